"""Builds the optional Cython replay kernel.

The package works without the extension (a pure-Python kernel is selected at
import time); set STUDYFLOW_NO_EXT=1 to skip compilation explicitly.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("STUDYFLOW_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            "src/studyflow/petri/_kernel_c.pyx",
            language_level=3,
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
