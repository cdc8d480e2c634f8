"""Build script for the compiled tabu-sweep kernel.

The extension is optional: if Cython (or a C compiler) is unavailable the
package installs in pure-Python mode and ``qready._kernels`` falls back to
the numpy implementation at import time.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "qready._kernels._tabu_cy",
                ["src/qready/_kernels/_tabu_cy.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
