"""Build script: compiles the optional fast-kernel extension.

The package works without the extension (a pure-Python twin of the kernels
is selected at import time), so a failed compilation only degrades speed.
Set PARTICLE_RIEMANN_PURE=1 to skip the extension on purpose.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("PARTICLE_RIEMANN_PURE") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "particle_riemann._kernels",
                    ["src/particle_riemann/_kernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
