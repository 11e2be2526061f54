# SPDX-License-Identifier: Apache-2.0
"""CMake-driven build for the hybridgs._core extension module."""
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        source_dir = Path(__file__).resolve().parent
        out_dir = Path(self.get_ext_fullpath(ext.name)).resolve().parent
        build_dir = Path(self.build_temp).resolve() / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)
        cfg_args = [
            "cmake",
            "-S", str(source_dir),
            "-B", str(build_dir),
            f"-DCMAKE_LIBRARY_OUTPUT_DIRECTORY={out_dir}",
            f"-DPython_EXECUTABLE={sys.executable}",
            "-DHYBRIDGS_BUILD_TESTS=OFF",
            "-DHYBRIDGS_BUILD_TOOLS=OFF",
            "-DCMAKE_BUILD_TYPE=Release",
        ]
        subprocess.run(cfg_args, check=True)
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "_core", "-j"],
            check=True,
        )


setup(
    ext_modules=[CMakeExtension("hybridgs._core")],
    cmdclass={"build_ext": CMakeBuild},
)
