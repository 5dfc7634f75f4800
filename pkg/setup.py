"""Build script: compiles the optional attention kernel extension.

The package works without the extension (a numpy fallback is selected at
import time), so any failure here degrades to a pure-Python install
instead of aborting.
"""

import warnings

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "promptspan._kernels._attention",
                sources=["src/promptspan/_kernels/_attention.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": 3},
    )
except ImportError as exc:  # pragma: no cover - depends on build host
    warnings.warn(f"Cython unavailable ({exc}); installing with the pure-numpy kernels only")

setup(ext_modules=ext_modules)
