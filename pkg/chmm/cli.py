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

    The chmm command line tool.

    2026-Oct-19  CHMM developers  Created this.
"""

import sys
import argparse
import importlib
from typing import List, NoReturn

from chmm.errors import CHMMError
from chmm.logger import get_logger
from chmm.utils import fail_with
from chmm.version import __version__
from chmm import defs

ADMIN_COMMANDS = ['status', 'start', 'stop', 'restart']


def rate(s: str) -> float:
    value = float(s)
    if not value > 0:
        raise argparse.ArgumentTypeError(f'rate must be positive, got {s}')
    return value


def parse_args(args: List[str] = []) -> argparse.Namespace:
    parser = argparse.ArgumentParser(description="Train, evaluate and run cascaded HMM head gesture recognizers.",
            prog="chmm",
            formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('--debug', action='store_true',
            help=f"Log at debug level and print tracebacks on failure.")
    # Commands always log to stderr; chmmd owns the log file
    parser.set_defaults(nolog=True)

    commands = parser.add_subparsers(dest='command', metavar='command', required=True)

    generate = commands.add_parser('generate', help='Synthesize a labelled gesture dataset.')
    generate.add_argument('--participants', type=int, default=defs.PARTICIPANTS,
            help=f"Number of synthetic participants. Default: {defs.PARTICIPANTS}.")
    generate.add_argument('--reps', type=int, default=defs.REPETITIONS,
            help=f"Repetitions of each gesture per participant. Default: {defs.REPETITIONS}.")
    generate.add_argument('--min-velocity', type=float, default=defs.VELOCITY_RANGE[0],
            help=f"Lowest preferred peak velocity in rad/s. Default: {defs.VELOCITY_RANGE[0]}.")
    generate.add_argument('--max-velocity', type=float, default=defs.VELOCITY_RANGE[1],
            help=f"Highest preferred peak velocity in rad/s. Default: {defs.VELOCITY_RANGE[1]}.")
    generate.add_argument('--noise', type=float, default=defs.NOISE_SIGMA,
            help=f"Sensor noise standard deviation in rad/s. Default: {defs.NOISE_SIGMA}.")
    generate.add_argument('--seed', type=int, default=0)
    generate.add_argument('--out', required=True, help="Dataset file to write.")

    train = commands.add_parser('train', help='Grid search the simple layer and train a cascade.')
    train.add_argument('--data', required=True, help="Dataset file.")
    train.add_argument('--n-min', type=int, default=defs.N_MIN)
    train.add_argument('--n-max', type=int, default=defs.N_MAX)
    train.add_argument('--m-min', type=int, default=defs.M_MIN)
    train.add_argument('--m-max', type=int, default=defs.M_MAX)
    train.add_argument('--sessions', type=int, default=defs.SESSIONS)
    train.add_argument('--seed', type=int, default=0)
    train.add_argument('--workers', type=int, default=1,
            help="Worker processes for the grid search. Default: 1.")
    train.add_argument('--tau-shake', type=float, default=defs.RUNTIME_TAU_SHAKE,
            help=f"Runtime Shaking threshold. Default: {defs.RUNTIME_TAU_SHAKE}.")
    train.add_argument('--tau-nod', type=float, default=defs.RUNTIME_TAU_NOD,
            help=f"Runtime Nodding threshold. Default: {defs.RUNTIME_TAU_NOD}.")
    train.add_argument('--out', required=True, help="Model file to write.")
    train.add_argument('--report', help="Write per-cell accuracies to this CSV file.")

    eval_ = commands.add_parser('eval', help='Score a trained model on a dataset.')
    eval_.add_argument('--model', required=True)
    eval_.add_argument('--data', required=True)
    eval_.add_argument('--report', required=True, help="Write per-class metrics to this CSV file.")

    replay = commands.add_parser('replay', help='Replay a gesture script and measure latency.')
    replay.add_argument('--model', required=True)
    replay.add_argument('--data', help="Build one script per participant from this dataset "
            "instead of synthesizing one.")
    replay.add_argument('--rate', type=rate, default=float('inf'),
            help="Replay speed as a multiple of the sample rate. Default: as fast as possible.")
    replay.add_argument('--script', help="Comma separated gesture script, e.g. RL,neutral,S,neutral.")
    replay.add_argument('--seed', type=int, default=0)
    replay.add_argument('--report', required=True, help="Write the latency table to this CSV file.")

    serve = commands.add_parser('serve', help='Run the gesture server in the foreground.')
    serve.add_argument('--model', required=True)
    serve.add_argument('--host', default=defs.CHMM_HOST)
    serve.add_argument('--port', type=int, default=defs.CHMM_PORT)

    admin = commands.add_parser('admin', help='Control the gesture daemon.')
    admin.add_argument('admin_command', metavar='admin_command', choices=ADMIN_COMMANDS,
            help=f"Choices are: {', '.join(ADMIN_COMMANDS)}.")
    admin.add_argument('--model', help="Model file for start and restart.")
    admin.add_argument('--port', type=int, help="Gesture server port for start and restart.")

    sessions = commands.add_parser('sessions', help='List gesture daemon connections.')
    sessions.add_argument('-g', '--gestures', action='store_true',
            help="List recently recognized complex gestures instead.")

    commands.add_parser('logs', help='Pretty-print the daemon log.')

    return parser.parse_args(args)


def main(sys_args: List[str] = sys.argv[1:]) -> NoReturn:
    args = parse_args(sys_args)
    defs.init(args)
    logger = get_logger()

    command = importlib.import_module(f'chmm.commands.chmm_{args.command}')
    try:
        command.main(args)
    except CHMMError as e:
        if args.debug:
            logger.error('', exc_info=e)
        fail_with(str(e))
    sys.exit(0)
