#!/usr/bin/env python3

"""
    CHMM (Cascaded Hidden Markov Models)  Real-time head gesture recognition.
    CHMM Copyright (C) 2026  The CHMM developers

    This program is free software: you can redistribute it and/or modify
    it under the terms of the GNU General Public License as published by
    the Free Software Foundation, either version 3 of the License, or
    (at your option) any later version.

    This program is distributed in the hope that it will be useful,
    but WITHOUT ANY WARRANTY; without even the implied warranty of
    MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
    GNU General Public License for more details.

    You should have received a copy of the GNU General Public License
    along with this program.  If not, see <https://www.gnu.org/licenses/>.

    2026-Oct-19  CHMM developers  Created this.
"""

from setuptools import setup

version = '0.1.0'

setup(
    name='chmm',
    version=version,
    description='Cascaded Hidden Markov Models: real-time head gesture recognition from angular velocity.',
    author='The CHMM developers',
    license='GPLv3+',
    packages=['chmm', 'chmm.commands'],
    scripts=['bin/chmmd', 'bin/chmm'],
    python_requires='>=3.8',
    install_requires=[
        'numpy>=1.22',
        'tabulate>=0.8.9',
        'colorama>=0.4.3',
        'fastapi>=0.60.1',
        'pydantic>=1.6.1',
        'uvicorn>=0.11.8',
        'uvloop>=0.14.0; sys_platform != "win32"',
        'python-daemon>=2.2.4',
        'ratelimit>=2.2.1',
        'requests>=2.24.0',
        'requests-unixsocket>=0.2.0',
    ],
    extras_require={
        'test': ['pytest>=6.0', 'httpx>=0.23'],
    },
)
