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

    Provides serveral constants for CHMM.

    2026-Oct-19  CHMM developers  Created this.
"""

import os
from argparse import Namespace

# Sampling rate of the head tracker in Hz
SAMPLE_RATE_HZ = 75.0

# Length of the symbol buffer feeding the simple layer (L_B)
BUFFER_LEN = 10
# Length of the meta-symbol queue feeding the complex layer (L_Q)
QUEUE_LEN = 10

# Motion onset threshold in rad/s
OMEGA_INIT = 0.1

# Thresholds used by output selection at runtime
RUNTIME_TAU_SHAKE = -5.0
RUNTIME_TAU_NOD = -4.0

# Grid search over states (N) and symbols (M)
N_MIN = 2
N_MAX = 6
M_MIN = 7
M_MAX = 25
SESSIONS = 5

# Complex layer topology
COMPLEX_N_STATES = 3
COMPLEX_N_SYMBOLS = 3

# K-Means
KMEANS_RESTARTS = 5
KMEANS_MAX_ITERATIONS = 300

# Baum-Welch
BW_MAX_ITERATIONS = 500
BW_TOLERANCE = 1e-6
EMISSION_FLOOR = 1e-6

# A symbol is idle if it exceeds this relative frequency in idle training sequences
IDLE_SYMBOL_FREQUENCY = 0.10

# Synthetic gestures
MAX_GESTURE_DURATION = 2.0
MAX_PEAK_VELOCITY = 10.0
RECORDING_DURATION = 2.0
VELOCITY_RANGE = (1.0, 3.0)
NOISE_SIGMA = 0.05
PARTICIPANTS = 19
REPETITIONS = 2
SIMPLE_DURATION_RANGE = (0.6, 1.2)
COMPLEX_DURATION_RANGE = (1.3, 2.0)
COMPLEX_PULSES = 3

# Script synthesis for real-time evaluation
SCRIPT_PEAK_VELOCITY = 2.0
SCRIPT_NOISE_SIGMA = 0.02
SCRIPT_LEAD_IN = 1.0
SCRIPT_SIMPLE_DURATION = 0.6
SCRIPT_COMPLEX_DURATION = 1.8
SCRIPT_NEUTRAL_DURATION = 1.0
# Scripted gestures start this many samples past a window boundary
SCRIPT_START_OFFSET = 7

# Per-step processing budget in milliseconds at 75 Hz
STEP_BUDGET_MS = 13.0

MODEL_FORMAT_VERSION = 1
DATASET_MAGIC = 'chmm-dataset'
DATASET_FORMAT_VERSION = 'v1'

LOG_DIR = '/var/log/chmm'

PIDFILE = '/run/chmmd.pid'

CHMM_DATA_DIR = '/var/lib/chmm'

CHMM_HOST = '127.0.0.1'

CHMM_PORT = 7575

# Complex gestures kept for GET /gestures
RECENT_GESTURES = 100

# Malformed sample lines logged per second, across all connections
MALFORMED_LOG_RATE = 10

CHMM_SOCK = '/var/run/chmmd.sock'

LOGFILE = os.path.join(LOG_DIR, 'chmm.log')


def init(args: Namespace) -> None:
    """
    Perform basic setup.
    """
    # Set log file location
    global LOGFILE
    LOGFILE = os.path.join(LOG_DIR, 'chmm.log')

    if not getattr(args, 'nolog', True):
        # Make data directory or set permissions of existing data directory
        try:
            os.makedirs(CHMM_DATA_DIR, mode=0o755, exist_ok=True)
        except OSError:
            os.chmod(CHMM_DATA_DIR, mode=0o755)

        # Make log directory or set permissions of existing log directory
        try:
            os.makedirs(LOG_DIR, mode=0o755, exist_ok=True)
        except OSError:
            os.chmod(LOG_DIR, mode=0o755)

    from chmm.logger import setup_logger
    setup_logger(args)
