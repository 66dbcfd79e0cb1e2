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

    Implements chmm eval.

    2026-Oct-19  CHMM developers  Created this.
"""

from argparse import Namespace

from chmm.cascade import load_model
from chmm.dataset import load_dataset
from chmm.evaluation import evaluate_model, format_metrics, write_metrics_report
from chmm.utils import fail_with

def main(args: Namespace) -> None:
    model = load_model(args.model)
    dataset = load_dataset(args.data)
    layers = evaluate_model(model, dataset)
    if not layers:
        fail_with(f'{args.data} holds no gestures to evaluate.')
    write_metrics_report(args.report, layers)
    print(format_metrics(layers))
