from setuptools import setup

try:
    from Cython.Build import cythonize
    from setuptools import Extension
except ImportError:  # pure-Python install; kernels fall back at import
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "zeno_tsvf._kernels",
                ["src/zeno_tsvf/_kernels.pyx"],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
