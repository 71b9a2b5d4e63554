#!/usr/bin/env python
# -*- coding: utf-8 -*-

# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT license.


import os

from setuptools import setup, find_packages


setup(
    name='dtnres',
    version=open(os.path.join("dtnres", "version.py")).read().split("=")[-1].strip("' \n"),
    author='dtnres developers',
    packages=find_packages(exclude=["tests"]),
    include_package_data=True,
    scripts=[
        "scripts/dtn-res",
    ],
    license='MIT',
    zip_safe=False,
    description="Scattering resonances of sound-hard obstacles with a DtN finite element method.",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    python_requires='>=3.6',
    install_requires=open('requirements.txt').readlines(),
    tests_require=[
        'pytest',
    ],
    extras_require={
        'vis': open('requirements-vis.txt').readlines(),
    },
)
