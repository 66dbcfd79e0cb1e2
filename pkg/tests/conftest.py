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

    Shared fixtures: a synthetic dataset and a small trained cascade.

    2026-Oct-19  CHMM developers  Created this.
"""
import os

import pytest

from chmm.cli import parse_args
from chmm.logger import CHMMLoggerClass
from chmm import defs

TRAINING = CHMMLoggerClass.TRAINING

# Seed of every session-scoped fixture
SEED = 7

# Redirect daemon state to /tmp/chmm
defs.CHMM_DATA_DIR = '/tmp/chmm/data'
defs.LOG_DIR = '/tmp/chmm/log'
defs.PIDFILE = '/tmp/chmm/chmmd.pid'
defs.CHMM_SOCK = '/tmp/chmm/chmmd.sock'
os.makedirs('/tmp/chmm', exist_ok=True)

args = parse_args('logs'.split())
defs.init(args)


@pytest.fixture(scope='session')
def dataset():
    """
    19 participants x 9 gestures x 2 repetitions.
    """
    from chmm.gestures import generate_dataset
    return generate_dataset(participants=19, repetitions=2, rng_seed=SEED)


@pytest.fixture(scope='session')
def model(dataset):
    """
    A cascade trained on a single N=3, M=12 cell, streaming with the
    default thresholds of -5 for Shaking and -4 for Nodding.
    """
    from chmm.training import build_cascade_model
    return build_cascade_model(dataset, n_states=3, n_symbols=12, rng_seed=SEED)


@pytest.fixture(scope='function')
def training_log(caplog):
    caplog.set_level(TRAINING)
    yield caplog
