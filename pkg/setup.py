import warnings

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("rootflow._fastkernel", ["src/rootflow/_fastkernel.pyx"])],
        language_level=3,
    )
except ImportError:
    warnings.warn("Cython not available; installing without the compiled kernel "
                  "(the pure-Python fallback is used instead)")
    ext_modules = []

setup(ext_modules=ext_modules)
