"""Build script for the compiled kernel extension.

The package works without the extension: ``rial.kernels`` falls back to the
pure-numpy implementation when ``rial._kernels`` is missing, so the extension
is marked optional and a failed compile only costs speed.
"""

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "rial._kernels",
                ["src/rial/_kernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
    for ext in extensions:
        ext.optional = True
except ImportError:
    extensions = []

setup(ext_modules=extensions)
