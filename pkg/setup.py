"""Build script: compiles the Cython integrator kernel when possible.

The package works without the extension (a pure-Python kernel is selected at
import time), so any build failure here degrades gracefully rather than
blocking installation. Set NANOROTOR_NO_EXTENSION=1 to skip the build.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if (not os.environ.get("NANOROTOR_NO_EXTENSION")
        and os.path.exists("src/nanorotor/_kernel.pyx")):
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "nanorotor._kernel",
                    ["src/nanorotor/_kernel.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
