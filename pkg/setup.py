"""Build script: compiles the Cython kernel extension when possible.

The extension is optional.  If Cython or a C compiler is unavailable (or
FLOWLAB_PURE=1 is set), the package installs anyway and falls back to the
pure-numpy kernels at import time.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("FLOWLAB_PURE", "0") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "flowlab._kernels_cy",
                    ["src/flowlab/_kernels_cy.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError as exc:
        print(f"flowlab: Cython unavailable ({exc}); installing pure-python kernels only")

setup(ext_modules=ext_modules)
