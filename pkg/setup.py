"""Build hook for the optional compiled Wigner kernel.

Project metadata lives in pyproject.toml.  When Cython is missing the
extension is skipped and the package runs on its NumPy fallback.
"""

from setuptools import setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("cvmetro._wigner_kernel", ["src/cvmetro/_wigner_kernel.pyx"],
                   extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
