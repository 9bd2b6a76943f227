"""Build script: compiles the optional kernel extension.

The package works without the extension (a pure-Python fallback is selected
at import time), so a failing compiler must not fail the install.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(f"WARNING: building mincov._speedups failed ({exc}); "
              "the pure-Python kernels will be used instead")


def extensions():
    if os.environ.get("MINCOV_NO_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension("mincov._speedups", ["src/mincov/_speedups.pyx"])
    return cythonize([ext], language_level="3")


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
