"""Build script: compiles the optional kernel extension.

The package is fully functional without the extension (pure-Python
kernels are selected at import when the compiled module is missing), so a
failed compile only costs speed. Build in place with
``python setup.py build_ext --inplace`` or just install the package.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("gridexit._kernels", ["src/gridexit/_kernels.pyx"])],
        language_level=3,
    )
except ImportError:
    print("Cython unavailable; building without the compiled kernels")

setup(ext_modules=ext_modules)
