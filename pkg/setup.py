# Builds the optional compiled GF(2) kernel. The package works without it;
# run `python setup.py build_ext --inplace` (requires Cython + a C compiler)
# to get the fast backend.
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [Extension("chainforge._gf2core", ["src/chainforge/_gf2core.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
