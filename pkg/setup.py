import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

# The compiled kernels are optional: if the extension cannot be built the
# package falls back to the numpy kernels at import time.
ext = Extension(
    "qsetsep.qsim._kernels",
    ["src/qsetsep/qsim/_kernels.pyx"],
    include_dirs=[np.get_include()],
    extra_compile_args=["-O3"],
    optional=True,
)

setup(
    ext_modules=cythonize([ext], compiler_directives={"language_level": "3"})
    if cythonize is not None
    else [],
)
