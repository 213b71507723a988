"""Build hook for the optional compiled Airy kernel.

If Cython is missing the package installs without it and falls back to the
pure-Python kernel at import time.
"""

from setuptools import setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("oswave._airy_core", ["src/oswave/_airy_core.pyx"])],
        compiler_directives={"language_level": 3},
    )

setup(ext_modules=ext_modules)
