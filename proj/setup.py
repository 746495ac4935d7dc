import os
import subprocess
import sys
from pathlib import Path

from setuptools import setup
from setuptools.command.build_ext import build_ext
from setuptools.extension import Extension


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    """Drives the repository CMake build to produce gssl/_core."""

    def build_extension(self, ext):
        out_dir = Path(self.get_ext_fullpath(ext.name)).parent.resolve() / "gssl"
        build_dir = Path(self.build_temp).resolve()
        build_dir.mkdir(parents=True, exist_ok=True)

        import pybind11

        cmake_args = [
            f"-DCMAKE_LIBRARY_OUTPUT_DIRECTORY={out_dir}",
            f"-DPYTHON_EXECUTABLE={sys.executable}",
            f"-Dpybind11_DIR={pybind11.get_cmake_dir()}",
            "-DCMAKE_BUILD_TYPE=Release",
            "-DGSSL_BUILD_TESTS=OFF",
            "-DGSSL_BUILD_CLI=OFF",
        ]
        source_dir = Path(__file__).parent.resolve()
        subprocess.run(["cmake", "-S", str(source_dir), "-B", str(build_dir)] + cmake_args,
                       check=True)
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "_core", "-j",
             str(os.cpu_count() or 2)],
            check=True,
        )


setup(
    ext_modules=[CMakeExtension("gssl._core")],
    cmdclass={"build_ext": CMakeBuild},
)
