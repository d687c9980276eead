# -*- coding: utf-8 -*-
import os
import sys

from setuptools import find_packages, setup

if sys.version_info[0:2] < (3, 8):
    raise RuntimeError("Python version >= 3.8 required.")

path = os.path.abspath(os.path.dirname(__file__))


def get_mallowsld_version():
    # keep aligned with src/mallowsld/__init__.py (see release.md)
    return "0.2.0"


mallowsld_version = get_mallowsld_version()


def generate_description():
    # get long description
    f = os.path.join(path, 'README.md')
    try:
        import pypandoc
        if pypandoc.__version__ == "1.4":
            long_description = '\n' + pypandoc.convert_file(f, 'rst')
        else:
            raise ImportError
    except ImportError:
        import logging
        logging.warning(
            "warning: pypandoc not found or incompatible, could not convert " +
            "Markdown to RST")
        with open(f, 'r') as readme:
            long_description = '\n' + readme.read()
    return long_description


setup(
    name="mallowsld",
    version=mallowsld_version,
    description='Large deviations of Mallows random permutations: '
    'q-combinatorics, pressure, rate function and the four-square problem.',
    long_description=generate_description(),
    license='BSD 3-Clause',
    classifiers=[
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: BSD License',
        'Operating System :: POSIX',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Topic :: Scientific/Engineering :: Mathematics'
    ],
    keywords='mallows permutations large deviations q-factorial',
    packages=find_packages('src'),
    package_dir={'': 'src'},
    python_requires='>=3.8',
    install_requires=[
        'numpy>=1.17',
        'scipy>=1.4',
    ],
    entry_points={
        'console_scripts': [
            'mallowsld=mallowsld.scripts:cli',
        ],
    },
)
