"""Build script for the optional compiled kernels.

The package is fully functional without the extension (a pure-Python
implementation is selected at import time); the Cython module only
accelerates the per-pixel mask kernels.
"""

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize
except ImportError:  # plain install without build toolchain
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "descshot.kernels._native",
                ["src/descshot/kernels/_native.pyx"],
                include_dirs=[np.get_include()],
                optional=True,
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules)
