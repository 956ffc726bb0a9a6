import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "relatom._kernels",
                ["src/relatom/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # no compiler / no cython: pure-Python fallback is used
    print(f"relatom: building without compiled kernels ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
