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

    Implements chmm logs.

    2026-Oct-19  CHMM developers  Created this.
"""

import os
from argparse import Namespace

from chmm import defs
from chmm.logger import color_log
from chmm.utils import fail_with

def main(args: Namespace) -> None:
    logfile = os.path.join(defs.LOG_DIR, 'chmm.log')

    try:
        f = open(logfile, 'r')
    except OSError as e:
        fail_with(f'Unable to read {logfile}: {e.strerror}')
    with f:
        for line in f:
            try:
                print(color_log(line.rstrip('\n')))
            except IOError:
                print(line.rstrip('\n'))
