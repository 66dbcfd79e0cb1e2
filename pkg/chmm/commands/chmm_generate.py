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

    Implements chmm generate.

    2026-Oct-19  CHMM developers  Created this.
"""

from argparse import Namespace

from chmm.dataset import save_dataset
from chmm.gestures import generate_dataset
from chmm.logger import get_logger

logger = get_logger(__name__)

def main(args: Namespace) -> None:
    dataset = generate_dataset(
        participants=args.participants,
        repetitions=args.reps,
        velocity_range=(args.min_velocity, args.max_velocity),
        noise_sigma=args.noise,
        rng_seed=args.seed,
    )
    save_dataset(dataset, args.out)
    print(f'Wrote {len(dataset)} gestures ({args.participants} participants x {args.reps} repetitions) to {args.out}.')
