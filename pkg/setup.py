"""Build script for the optional compiled rotation kernel.

The package works without the extension (a numpy fallback is selected at
import time), so failure to compile is downgraded to a warning rather than
aborting the install.
"""

import sys

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize
except ImportError:
    numpy = None
    cythonize = None


def extensions():
    if cythonize is None or numpy is None:
        print("fcireduce: Cython/numpy unavailable, skipping compiled kernel",
              file=sys.stderr)
        return []
    ext = Extension(
        "fcireduce._kernels_cy",
        sources=["src/fcireduce/_kernels_cy.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize(
        [ext],
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "language_level": 3,
        },
    )


setup(ext_modules=extensions())
