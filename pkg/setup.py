"""Build script: compiles the optional Cython scan core.

The package is fully functional without the extension (a pure-Python
twin of every kernel is selected at import time), so a failed or
unavailable compile must never break installation.
"""

import os

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """build_ext that downgrades compiler failures to a warning."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001 - any build failure is non-fatal
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(f"WARNING: compiled core not built ({exc}); "
              "falling back to the pure-Python kernels.")


def extensions():
    if os.environ.get("ADVLOSS_NO_EXTENSION"):
        return []
    if not os.path.exists("src/advloss/_core.pyx"):
        return []
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        print("WARNING: Cython or numpy unavailable at build time; "
              "skipping the compiled core.")
        return []
    from setuptools import Extension

    ext = Extension(
        "advloss._core",
        ["src/advloss/_core.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
