"""Build script: compiles the hot-loop kernels as a C extension when possible.

The extension is optional. If Cython or a C compiler is missing, the install
proceeds and the package falls back to the pure-numpy kernels in
``tangentrep._kernels._py`` (selected at import time).
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing entirely
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            f"WARNING: building the compiled kernel failed ({exc}); "
            "tangentrep will use the pure-numpy fallback kernels.",
            file=sys.stderr,
        )


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        print(
            "WARNING: Cython not available; skipping compiled kernels.",
            file=sys.stderr,
        )
        return []
    ext = Extension(
        "tangentrep._core",
        ["src/tangentrep/_core.pyx"],
        extra_compile_args=["-O3"],
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
