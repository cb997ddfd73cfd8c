"""Build script with an optional compiled kernel extension.

The package is pure Python plus one Cython extension, ``privapi._kernels._speed``,
holding the hot text kernels (keyword-conversion scan, hashed bag-of-words).
If Cython or a C compiler is unavailable the build falls back to the pure
Python implementations in ``privapi._kernels._pure``; everything still works,
only slower. Build in place for development with::

    python setup.py build_ext --inplace
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("privapi._kernels._speed", ["src/privapi/_kernels/_speed.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
