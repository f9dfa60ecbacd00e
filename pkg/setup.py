"""Builds the optional compiled kernels; the package works without them."""

import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if os.environ.get("MATCHKIT_NO_EXT", "") not in ("1", "true", "yes"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("matchkit._ckernels", ["src/matchkit/_ckernels.pyx"], include_dirs=[np.get_include()])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
