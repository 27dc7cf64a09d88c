"""Build script: compiles the optional accelerator extension.

The package is fully functional without the extension (a pure-Python twin of
every kernel ships in matchkit/_mmcore_py.py and is selected automatically at
import time).  If Cython or a C++ toolchain is unavailable the build degrades
to pure Python instead of failing.
"""

from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/matchkit/_mmcore.pyx"],
        language_level=3,
    )
except ImportError:
    print("warning: Cython not available; building without the compiled core")
    ext_modules = []

setup(ext_modules=ext_modules)
