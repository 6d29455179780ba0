import numpy
from setuptools import Extension, setup

# The compiled kernels are an optional accelerator: if Cython or a C compiler
# is unavailable the package falls back to the NumPy implementation at import.
ext = Extension(
    "momentsphere._kernels",
    ["src/momentsphere/_kernels.pyx"],
    include_dirs=[numpy.get_include()],
    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    extra_compile_args=["-O3"],
    optional=True,
)

try:
    from Cython.Build import cythonize

    ext_modules = cythonize([ext], compiler_directives={"language_level": "3"})
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
