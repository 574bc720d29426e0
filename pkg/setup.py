from setuptools import setup, find_packages

setup(
    name="platonav",
    version="0.1.0",
    description="Reset-free policy learning with an adaptive MPC teacher on a planar navigation simulator",
    author="Your Name",
    author_email="your.email@example.com",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    install_requires=[
        "numpy>=1.20.0",
        "scipy>=1.7.0",
        "protobuf>=3.20.0",
        "click>=8.0.0",
    ],
    extras_require={
        "test": ["pytest>=7.0"],
    },
    python_requires=">=3.8",
)
