"""Build hook for the optional compiled kernel.

The package works without it: ``tempora.kernels`` falls back to the pure
Python implementation when ``tempora._refine`` cannot be imported.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("TEMPORA_NO_EXT", "") in ("", "0"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [Extension("tempora._refine", ["src/tempora/_refine.pyx"],
                       include_dirs=[numpy.get_include()],
                       define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")])],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
