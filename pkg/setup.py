import warnings

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    warnings.warn("Cython not found; putlab will use its pure-Python simplex kernel.")
    cythonize = None


ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [Extension("putlab._simplex", ["src/putlab/_simplex.pyx"], extra_compile_args=["-O3"])],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules)
