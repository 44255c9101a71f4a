# based on https://github.com/pypa/sampleproject

import pathlib

from setuptools import find_packages, setup


here = pathlib.Path(__file__).parent.resolve()

# Get the long description from the README file
long_description = (here / "README.md").read_text(encoding="utf-8")

setup(
    name="satsir",
    version="0.1.0",
    description="SIR epidemic model with saturated incidence and recovery: analysis, bifurcations, scenarios",
    long_description=long_description,
    long_description_content_type="text/markdown",
    license="MIT",
    package_dir={"": "src"},
    packages=find_packages(where="src"),
    package_data={"satsir": ["satsir.default.toml"]},
    include_package_data=True,
    zip_safe=False,
    python_requires=">=3.8, <4",
    install_requires=[
        "attrs",
        "click",
        "coloredlogs",
        "dynaconf",
        "numpy",
        "pyyaml",
        "scipy",
    ],
    extras_require={
        "dev": [
            "build",
            "check-manifest>=0.42",
            "coverage",
            "pip-tools",
            "tox >= 4",
        ],
    },
    entry_points={
        "console_scripts": [
            "satsir=satsir.cli:cli",
        ],
    },
    classifiers=[
        'License :: OSI Approved :: MIT License',
    ],
)
