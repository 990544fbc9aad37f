"""Build the optional compiled propagation kernel.

The package works without it (a NumPy fallback is selected at import time),
so any failure to compile the extension is non-fatal.
"""

import numpy
from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/ccaqed/_kernel.pyx"],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except Exception:
    pass

setup(
    ext_modules=ext_modules,
    include_dirs=[numpy.get_include()],
)
