from setuptools import Extension, setup

# The compiled kernel is optional: the package falls back to the pure-Python
# implementation in polarfb._kernels.pure when the extension is unavailable.
try:
    import numpy as np
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "polarfb._kernels._core",
                ["src/polarfb/_kernels/_core.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
