from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

ext = Pybind11Extension(
    "fagan._fagan",
    sources=[
        "python/bindings.cpp",
        "src/image.cpp",
        "src/bicubic.cpp",
        "src/phantom.cpp",
        "src/dataset.cpp",
        "src/metrics.cpp",
        "src/config.cpp",
        "src/checkpoint.cpp",
        "src/train.cpp",
    ],
    include_dirs=["include", "/usr/include/eigen3"],
    cxx_std=20,
    extra_compile_args=["-fopenmp"],
    extra_link_args=["-fopenmp"],
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
