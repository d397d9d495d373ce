#!/usr/bin/env python
#   Copyright (c) 2024 by the cmflow developers. All rights reserved.
#
#   Released under the BSD license. See the LICENSE file for details.
"""
A setuptools setup file for cmflow.
"""
import os
import sys

from setuptools import setup

if os.path.exists('MANIFEST'):
    os.remove('MANIFEST')

keywords = [
    'convex geometry', 'curvature flow', 'Christoffel-Minkowski',
    'Minkowski problem', 'support function', 'PDE', 'numerical analysis',
]

packages = [
    'cmflow',
    'cmflow.strategy',
    'cmflow.grid',
    'cmflow.flow',
    'cmflow.contrib',
]

with open('README.rst') as f:
    long_description = f.read()

platforms = 'OS Independent'

classifiers = [
    'Development Status :: 3 - Alpha',
    'Environment :: Console',
    'Intended Audience :: Education',
    'Intended Audience :: Science/Research',
    'License :: OSI Approved :: BSD License',
    'Natural Language :: English',
    'Operating System :: OS Independent',
    'Programming Language :: Python',
    'Programming Language :: Python :: 3',
    'Programming Language :: Python :: 3.6',
    'Programming Language :: Python :: 3.7',
    'Programming Language :: Python :: 3.8',
    'Topic :: Scientific/Engineering :: Mathematics',
]


def main():
    if sys.version_info[:2] < (3, 6):
        sys.stderr.write("cmflow requires Python version 3.6 or higher.\n")
        sys.exit(1)

    if sys.argv[-1] == 'setup.py':
        sys.stdout.write("To install, run 'python setup.py install'\n\n")

    setup_options = dict(
        author='the cmflow developers',
        classifiers=classifiers,
        description='A constrained curvature flow solver for the '
            'Christoffel-Minkowski problem',
        keywords=keywords,
        license='BSD License',
        long_description=long_description,
        name='cmflow',
        packages=packages,
        platforms=platforms,
        entry_points={'console_scripts': ['cmflow = cmflow.cli:main']},
        version=(
            [
                ln for ln in open(os.path.join(os.path.dirname(__file__), 'cmflow', '__init__.py'))
                if '__version__' in ln
            ][0]
            .split('=')[-1]
            .strip()
            .strip('\'"')
        ),
        install_requires=['numpy>=1.13', 'scipy>=1.0'],
        extras_require={'test': ['pytest>=3.9', 'pytest-cov', 'hypothesis']},
    )

    setup(**setup_options)

if __name__ == "__main__":
    main()
