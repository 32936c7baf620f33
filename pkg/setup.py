"""Build hook for the optional Cython kernels.

The package is fully functional without the compiled extension; when
Cython or a C compiler is missing the pure-Python kernels are used.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "rowsample._ckernels",
                ["src/rowsample/_ckernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
