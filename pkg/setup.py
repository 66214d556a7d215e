import numpy as np
from setuptools import Extension, setup

# The compiled kernel is optional: zonored.kernels falls back to the numpy
# implementation when the extension is missing (see src/zonored/kernels).
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "zonored.kernels._native",
                ["src/zonored/kernels/_native.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
