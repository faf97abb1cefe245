"""Build script: compiles the optional fast thinning kernel when Cython is available.

The package is fully functional without the extension (a vectorized numpy
fallback is selected at import time); the extension just makes separated-net
construction faster at large point counts.
"""

import numpy as np
from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "negcurve._thin",
                ["src/negcurve/_thin.pyx"],
                include_dirs=[np.get_include()],
                language="c++",
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
