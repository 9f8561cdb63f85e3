"""Builds the optional compiled kernel extension.

The package works without it (pure-Python fallback is selected at import);
a failed compile downgrades to a warning rather than breaking the install.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "sqlmend._speedups",
                sources=["src/sqlmend/_speedups.pyx"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
