"""Build script for the optional compiled similarity kernels.

The package is fully functional without a C toolchain: if the extension
cannot be built, vadkit.kernels falls back to the numpy implementation
at import time.
"""
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # toolchain missing or broken
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            f"warning: compiled kernels not built ({exc}); "
            "vadkit will use the pure-numpy fallback",
            file=sys.stderr,
        )


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "vadkit.kernels._fused",
        sources=["src/vadkit/kernels/_fused.pyx"],
        extra_compile_args=["-O3", "-march=native", "-ffast-math"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
