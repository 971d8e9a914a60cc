from setuptools import setup, find_packages

setup(
    name="formreg",
    version="1.0.0",
    packages=find_packages(include=["src", "src.*"]),
    python_requires=">=3.9",
    install_requires=[
        "numpy>=1.24.0",
        "scipy>=1.10.0",
        "sympy>=1.12",
        "pandas>=2.2.0",
        "pydantic>=2.5.0",
    ],
    entry_points={
        "console_scripts": [
            "formreg=src.cli.formreg_cli:main",
        ],
    },
)
