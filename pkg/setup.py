"""Build hook for the optional compiled matcher core.

The package works without the extension (a pure-Python fallback is selected
at import time), so a failed compile downgrades to a warning instead of
aborting the install.
"""

from setuptools import setup

ext_modules = []
include_dirs = []
try:
    import numpy
    from Cython.Build import cythonize

    include_dirs = [numpy.get_include()]
    ext_modules = cythonize(
        ["src/geoforge/engine/_match_core.pyx"],
        language_level=3,
    )
    for ext in ext_modules:
        ext.include_dirs = include_dirs
        ext.define_macros = [("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")]
except Exception as exc:  # pragma: no cover - build environment dependent
    import warnings

    warnings.warn(f"compiled matcher core skipped: {exc}")

setup(ext_modules=ext_modules)
