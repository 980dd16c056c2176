"""Build script: compiles the optional Cython SE kernels.

The package works without the extension (a numpy fallback is selected at
import time), so any build failure here downgrades to a warning instead of
aborting the install.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "nafdplan._se_kernels",
                ["src/nafdplan/_se_kernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"warning: Cython kernels not built ({exc}); using numpy fallback",
          file=sys.stderr)

setup(ext_modules=ext_modules)
