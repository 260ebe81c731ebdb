"""Build the optional compiled core; the package works without it."""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # no Cython: install the pure-Python package only
    setup()
else:
    import numpy

    ext = Extension(
        "rkinterp._core",
        ["src/rkinterp/_core.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3"],
    )
    setup(ext_modules=cythonize([ext], compiler_directives={"language_level": 3}))
