from setuptools import Extension, setup

# The Louvain kernel ships both as a Cython extension and as a pure-Python
# module; themeflow.communities picks whichever imports.  -ffp-contract=off
# keeps the C double arithmetic bit-identical to CPython floats so both
# backends return the same partitions.
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "themeflow._louvain_cy",
                ["src/themeflow/_louvain_cy.pyx"],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
