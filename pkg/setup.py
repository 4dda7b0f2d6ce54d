"""Build script for the optional Cython kernel core.

The package works without the extension; ``congestlab.kernels`` falls back
to the pure-Python implementation when ``_kernels`` cannot be imported.
Set ``CONGESTLAB_NO_EXT=1`` to skip compiling.
"""
import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("CONGESTLAB_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:  # pragma: no cover - build without Cython
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "congestlab._kernels",
                    ["src/congestlab/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
        )

setup(ext_modules=ext_modules)
