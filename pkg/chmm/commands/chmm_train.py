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

    Implements chmm train.

    2026-Oct-19  CHMM developers  Created this.
"""

from argparse import Namespace

from chmm.cascade import save_model
from chmm.dataset import load_dataset
from chmm.evaluation import macro_metrics
from chmm.logger import get_logger
from chmm.training import (assemble_cascade_model, evaluate_complex_layer, format_summary, grid_search,
        write_grid_report)

logger = get_logger(__name__)

def main(args: Namespace) -> None:
    dataset = load_dataset(args.data)
    result = grid_search(
        dataset,
        n_range=(args.n_min, args.n_max),
        m_range=(args.m_min, args.m_max),
        sessions=args.sessions,
        rng_seed=args.seed,
        workers=args.workers,
    )
    fit = result.best_model
    model = assemble_cascade_model(fit, result.split, args.seed, args.tau_shake, args.tau_nod)
    confusion = evaluate_complex_layer(model.complex, model.simple_models, result.split.test, model.codebook,
            model.buffer_len, model.queue_len)
    complex_metrics = macro_metrics(confusion) if confusion.total else None

    save_model(model, args.out)
    if args.report:
        write_grid_report(result, args.report)
    print(format_summary(result, model.complex, complex_metrics))
    print(f'Saved model to {args.out}.')
