import os
import sys

import numpy as np
from setuptools import Extension, setup


def extensions():
    if os.environ.get("FBGAME_NO_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        print("Cython not available; installing the pure-Python kernels only", file=sys.stderr)
        return []
    args = [] if sys.platform == "win32" else ["-O3", "-fcx-limited-range"]
    ext = Extension(
        "fbgame._kernels",
        ["src/fbgame/_kernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=args,
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions())
