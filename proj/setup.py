"""Builds the fairexpo._core extension by driving the CMake tree."""

import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name: str, source_dir: str = "") -> None:
        super().__init__(name, sources=[])
        self.source_dir = str(Path(source_dir).resolve())


class CMakeBuild(build_ext):
    def build_extension(self, ext: CMakeExtension) -> None:
        # The extension installs as fairexpo/_core*.so; point CMake's output
        # at the package directory inside the build tree.
        out_dir = Path(self.get_ext_fullpath(ext.name)).resolve().parent
        build_dir = Path(self.build_temp) / ext.name
        build_dir.mkdir(parents=True, exist_ok=True)

        pybind11_dir = subprocess.check_output(
            [sys.executable, "-m", "pybind11", "--cmakedir"], text=True
        ).strip()

        configure = [
            "cmake",
            ext.source_dir,
            "-DCMAKE_BUILD_TYPE=Release",
            "-DFAIREXPO_BUILD_PYTHON=ON",
            "-DFAIREXPO_BUILD_TESTING=OFF",
            f"-DCMAKE_LIBRARY_OUTPUT_DIRECTORY={out_dir}",
            f"-Dpybind11_DIR={pybind11_dir}",
            f"-DPython3_EXECUTABLE={sys.executable}",
        ]
        subprocess.run(configure, cwd=build_dir, check=True)
        subprocess.run(
            ["cmake", "--build", ".", "--target", "_core", "--parallel"],
            cwd=build_dir,
            check=True,
        )


setup(
    packages=["fairexpo"],
    package_dir={"fairexpo": "python/fairexpo"},
    ext_modules=[CMakeExtension("fairexpo._core", source_dir=".")],
    cmdclass={"build_ext": CMakeBuild},
    zip_safe=False,
)
