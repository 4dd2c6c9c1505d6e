import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from khovanov.cli import default_corpus_path


@pytest.fixture(scope="session")
def corpus():
    with open(default_corpus_path()) as f:
        return json.load(f)


@pytest.fixture(scope="session")
def corpus_by_name(corpus):
    return {e["name"]: e for e in corpus}
