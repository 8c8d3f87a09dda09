#!/usr/bin/env python

import setuptools
import os


with open("README.md", "r") as fh:
    long_description = fh.read()


def read_requirements(name):
    with open(os.path.join("requirements", name)) as f:
        return [line.strip() for line in f if line.strip() and not line.startswith("#")]


with open(os.path.join('mecip', '_version.py'), 'r') as version_file:
    version_globals = {}
    exec(version_file.read(), version_globals)
    version = version_globals['__version__']


setuptools.setup(
    name="mecip",
    version=version,
    description="Markov equivalence class learning for discrete Bayesian networks",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=('test', 'test.*', 'e2e')),
    package_data={'mecip': ['templates/*.j2']},
    include_package_data=True,
    python_requires=">=3.9",
    classifiers=[
        "Programming Language :: Python :: 3",
        "Operating System :: OS Independent",
    ],
    install_requires=read_requirements("base.txt"),
    entry_points={
        'console_scripts': ['mecip=mecip.cli:main'],
    },
)
