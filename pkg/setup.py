"""Build script: the compiled kernel is optional; a failed build falls back to numpy."""

import platform

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - environment dependent
            print(f"warning: compiled kernels not built ({exc}); using the numpy fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover - environment dependent
            print(f"warning: could not build {ext.name} ({exc}); using the numpy fallback")


def extensions():
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "anderson_forge._ckernels",
        ["src/anderson_forge/_ckernels.pyx"],
        include_dirs=[np.get_include(), "src/anderson_forge"],
        extra_compile_args=["-O3"] + (["-mpclmul"] if platform.machine() in ("x86_64", "AMD64") else []),
    )
    return cythonize([ext], compiler_directives={"language_level": "3"}, quiet=True)


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
