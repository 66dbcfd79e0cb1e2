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

    Implements chmm replay.

    2026-Oct-19  CHMM developers  Created this.
"""

from argparse import Namespace
from collections import OrderedDict

from tabulate import tabulate

from chmm.cascade import load_model
from chmm.dataset import load_dataset
from chmm.evaluation import latencies_by_gesture, latency_table, write_latency_table
from chmm.gestures import DEFAULT_SCRIPT, parse_script, synthesize_script
from chmm.harness import dataset_scripts, replay
from chmm.logger import get_logger

logger = get_logger(__name__)

def main(args: Namespace) -> None:
    model = load_model(args.model)
    labels = parse_script(args.script) if args.script else DEFAULT_SCRIPT

    if args.data:
        scripts = dataset_scripts(load_dataset(args.data), labels, rng_seed=args.seed)
    else:
        scripts = OrderedDict(synthetic=synthesize_script(labels, rng_seed=args.seed))

    rows = OrderedDict()
    for name, (motion, segments) in scripts.items():
        report = replay(model, motion, args.rate, segments)
        rows[name] = latencies_by_gesture(report.latencies)
        for segment in report.missed:
            logger.warning(f'{name}: no {segment.label.display_name} event for frames '
                    f'[{segment.start}, {segment.stop})')
        print(f'{name}: {report.frames_processed} frames, {len(report.events)} events, '
                f'step time mean {report.mean_step_time_ms:.3f} ms max {report.max_step_time_ms:.3f} ms, '
                f'{report.budget_violations} over budget')

    table = latency_table(rows)
    write_latency_table(args.report, rows)
    print(tabulate(table[1:], headers=table[0]))
