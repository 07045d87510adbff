from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # The package works without the compiled kernel; evaluation falls back
    # to the pure-Python implementation.
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("lexfst._kernel", ["src/lexfst/_kernel.pyx"])],
        language_level="3",
    )

setup(ext_modules=ext_modules)
