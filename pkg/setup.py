# Builds the optional compiled kernels. Without Cython (or a C compiler) the
# package still installs and runs on the numpy fallback.
#
#    pip install -e . --no-build-isolation
#    python setup.py build_ext --inplace

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "volterra_weighted._kernels",
                ["src/volterra_weighted/_kernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
