import warnings

from setuptools import setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        "src/dtquiver/_ckernels.pyx",
        compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
    )
else:
    warnings.warn("Cython not found; dtquiver will use its pure-Python kernels")

setup(ext_modules=ext_modules)
