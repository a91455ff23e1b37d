"""Build script: compiles the optional Cython decode kernel.

The package works without the extension (a pure-Python kernel is selected
at import time), so any build failure here downgrades to a pure install.
"""

from setuptools import setup

try:
    import numpy
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    extensions = cythonize(
        [
            Extension(
                "csma_sic._sic_core",
                ["src/csma_sic/_sic_core.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception:  # pragma: no cover - pure-python fallback install
    extensions = []

setup(ext_modules=extensions)
