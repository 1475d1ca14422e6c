import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "sshg_defect.simulator._kernels",
        ["src/sshg_defect/simulator/_kernels.pyx"],
        include_dirs=[np.get_include(), "src/sshg_defect/simulator"],
        # fast-math at compile time only lets gcc call the SIMD exp of libm;
        # it is kept off the link line so no flush-to-zero startup code is linked
        extra_compile_args=["-O3", "-march=native", "-ffast-math"],
        libraries=["m"],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    )
)
