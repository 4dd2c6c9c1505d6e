"""Build script: compiles the optional Cython census kernel.

The package is fully functional without the extension; if Cython or a C
compiler is unavailable the build silently falls back to pure Python
(`khovanov.kernels` selects the implementation at import time).
"""

from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/khovanov/_census_cy.pyx"],
        compiler_directives={"language_level": "3"},
    )
except Exception:
    ext_modules = []

setup(ext_modules=ext_modules)
