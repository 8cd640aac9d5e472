"""Build script: compiles the hot-loop kernels when Cython and a C compiler
are available.  Without them the package installs anyway and falls back to
the pure-Python kernels at import time (see symmpix/kernels/__init__.py).

Set SYMMPIX_PURE_PYTHON=1 to skip the extension build explicitly.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("SYMMPIX_PURE_PYTHON") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "symmpix.kernels._core",
                    ["src/symmpix/kernels/_core.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    # keep bit-identical with the pure-Python kernels: no
                    # FMA contraction, no fast-math reassociation
                    extra_compile_args=["-ffp-contract=off"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
