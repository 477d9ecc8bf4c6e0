from setuptools import setup, find_packages
from os import path

cur_dir = path.abspath(path.dirname(__file__))

# parse requirements
with open(path.join(cur_dir, "requirements.txt"), "r") as f:
    requirements = f.read().split()

setup(
    name="zforge",
    version="0.1.0",
    packages=find_packages(),
    install_requires=requirements,
    extras_require={"dev": ["pytest", "pytest-cov", "hypothesis"]},
    include_package_data=True,
    package_data={"zforge": ["files/*.yml"]},
    python_requires=">=3.9",
    entry_points={
        "console_scripts": [
            "zforge=zforge.cli:main",
        ],
        "orchestration": [
            "zforge.flow.sweep=zforge.flow:zforge_sweep_flow",
            "zforge.flow.monotone=zforge.flow:monotone_theorem_flow",
        ],
    },
)
