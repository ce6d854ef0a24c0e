"""Builds the optional Cython kernels; the package runs without them."""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("PHYLOCONSENSUS_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        extensions = [
            Extension("phyloconsensus.dynforest._lct",
                      ["src/phyloconsensus/dynforest/_lct.pyx"],
                      language="c++", extra_compile_args=["-O3"]),
            Extension("phyloconsensus._kernels",
                      ["src/phyloconsensus/_kernels.pyx"],
                      language="c++", extra_compile_args=["-O3"]),
        ]
        ext_modules = cythonize(extensions, compiler_directives={"language_level": "3"})

setup(ext_modules=ext_modules)
