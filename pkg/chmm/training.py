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

    Offline training: data preparation, the simple layer with its (N, M)
    grid search, and calibration of the complex layer.

    2026-Oct-19  CHMM developers  Created this.
"""

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from tabulate import tabulate

from chmm.errors import ArtifactIOError, InvalidArgumentError, ValidationError
from chmm.evaluation import ConfusionMatrix, MacroMetrics, confusion_matrix, macro_metrics
from chmm.hmm import (DiscreteHmm, baum_welch, forward_log_likelihood, forward_log_likelihood_batch,
        init_left_right, validate_hmm)
from chmm.logger import get_logger
from chmm.structs import GestureLabel, LabeledGesture, Dataset, QUEUED_LABELS, REJECTED
from chmm.utils import derive_seed, make_rng
from chmm.vq import Codebook, kmeans_fit, quantize_sequence
from chmm import defs

logger = get_logger(__name__)

SIMPLE_LABELS = GestureLabel.simple()
COMPLEX_LABELS = GestureLabel.complex()

# Per-model meta-symbol alphabets of the complex layer; anything else is 1
SHAKE_ALPHABET = {GestureLabel.ROTATING_LEFT: 2, GestureLabel.ROTATING_RIGHT: 3}
NOD_ALPHABET = {GestureLabel.TILTING_UPWARD: 2, GestureLabel.TILTING_DOWNWARD: 3}

# Calibrated thresholds sit this far below the lowest training score so
# that every calibration window passes the strict threshold test.
THRESHOLD_MARGIN = 1e-9

SimpleLayer = Tuple[DiscreteHmm, ...]


@dataclass(frozen=True)
class DatasetSplit:
    train: Tuple[LabeledGesture, ...]
    test: Tuple[LabeledGesture, ...]


@dataclass(frozen=True)
class PreparedWindows:
    """
    Fixed-length symbol windows keyed by label, plus the idle-stripped
    symbol sequence of every item they were cut from.
    """
    train: Dict[GestureLabel, np.ndarray]
    test: Dict[GestureLabel, np.ndarray]
    train_sequences: Dict[GestureLabel, List[np.ndarray]]
    test_sequences: Dict[GestureLabel, List[np.ndarray]]
    skipped: int = 0


@dataclass(frozen=True, eq=False)
class ComplexCalibration:
    shake_hmm: DiscreteHmm
    nod_hmm: DiscreteHmm
    tau_shake: float
    tau_nod: float

    def violations(self) -> List[str]:
        violations = []
        for name, hmm in (('shake_hmm', self.shake_hmm), ('nod_hmm', self.nod_hmm)):
            violations.extend(f'{name}: {v}' for v in validate_hmm(hmm))
            if hmm.n_symbols != defs.COMPLEX_N_SYMBOLS:
                violations.append(f'{name} has {hmm.n_symbols} symbols, expected {defs.COMPLEX_N_SYMBOLS}')
        for name, tau in (('tau_shake', self.tau_shake), ('tau_nod', self.tau_nod)):
            if not (np.isfinite(tau) and tau <= 0):
                violations.append(f'{name} = {tau!r} must be finite and <= 0')
        return violations

    def to_dict(self) -> Dict:
        return {
            'shake_hmm': self.shake_hmm.to_dict(),
            'nod_hmm': self.nod_hmm.to_dict(),
            'tau_shake': self.tau_shake,
            'tau_nod': self.tau_nod,
        }

    @classmethod
    def from_dict(cls, d: Dict) -> 'ComplexCalibration':
        return cls(DiscreteHmm.from_dict(d['shake_hmm']), DiscreteHmm.from_dict(d['nod_hmm']),
                float(d['tau_shake']), float(d['tau_nod']))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ComplexCalibration):
            return NotImplemented
        return (self.shake_hmm == other.shake_hmm and self.nod_hmm == other.nod_hmm
                and self.tau_shake == other.tau_shake and self.tau_nod == other.tau_nod)


@dataclass(frozen=True)
class SimpleLayerFit:
    """
    One trained (session, N, M) cell of the grid.
    """
    session: int
    n_states: int
    n_symbols: int
    codebook: Codebook
    idle_symbols: FrozenSet[int]
    simple_models: SimpleLayer
    confusion: ConfusionMatrix
    accuracy: float


@dataclass(frozen=True)
class GridSearchResult:
    accuracy_table: Dict[Tuple[int, int], float]
    cells: Dict[Tuple[int, int, int], float]
    best_n: int
    best_m: int
    best_session: int
    best_accuracy: float
    best_model: SimpleLayerFit
    split: DatasetSplit


# =================================================================
# Data preparation
# =================================================================

def split_dataset(dataset: Dataset, rng_seed: int) -> DatasetSplit:
    """
    Split every label's items in half by a seeded shuffle.
    The training half gets the extra item when a label has an odd count.
    """
    train, test = [], []
    for label, items in dataset.by_label().items():
        if not items:
            continue
        if len(items) < 2:
            raise ValidationError('Cannot split dataset', [f'{label.display_name} has {len(items)} item'])
        order = make_rng(rng_seed, label).permutation(len(items))
        half = (len(items) + 1) // 2
        train.extend(items[i] for i in sorted(order[:half]))
        test.extend(items[i] for i in sorted(order[half:]))
    return DatasetSplit(tuple(train), tuple(test))


def identify_idle_symbols(idle_items: Iterable[LabeledGesture], codebook: Codebook,
        threshold: float = defs.IDLE_SYMBOL_FREQUENCY) -> FrozenSet[int]:
    """
    Symbols whose relative frequency within idle recordings exceeds @threshold.
    """
    symbols = [quantize_sequence(codebook, item.motion.omega) for item in idle_items]
    symbols = np.concatenate(symbols) if symbols else np.zeros(0, dtype=np.int64)
    if not symbols.size:
        return frozenset()
    frequency = np.bincount(symbols, minlength=codebook.k + 1) / symbols.size
    return frozenset(int(s) for s in np.nonzero(frequency > threshold)[0])


def item_symbols(item: LabeledGesture, codebook: Codebook, idle_symbols: FrozenSet[int]) -> np.ndarray:
    """
    Quantize an item; drop idle symbols unless the item is itself idle.
    """
    symbols = quantize_sequence(codebook, item.motion.omega)
    if item.label != GestureLabel.BEING_IDLE and idle_symbols:
        symbols = symbols[~np.isin(symbols, sorted(idle_symbols))]
    return symbols


def partition_windows(symbols: np.ndarray, window_len: int) -> np.ndarray:
    """
    Consecutive non-overlapping windows of @window_len; a short remainder is dropped.
    """
    if window_len < 1:
        raise InvalidArgumentError(f'window_len must be >= 1, got {window_len}')
    symbols = np.asarray(symbols, dtype=np.int64)
    count = len(symbols) // window_len
    return symbols[:count * window_len].reshape(count, window_len)


def _windows_by_label(items: Sequence[LabeledGesture], codebook: Codebook, idle_symbols: FrozenSet[int],
        window_len: int) -> Tuple[Dict[GestureLabel, np.ndarray], Dict[GestureLabel, List[np.ndarray]], int]:
    sequences: Dict[GestureLabel, List[np.ndarray]] = {}
    windows: Dict[GestureLabel, List[np.ndarray]] = {}
    skipped = 0
    for item in items:
        symbols = item_symbols(item, codebook, idle_symbols)
        if not symbols.size:
            skipped += 1
            continue
        sequences.setdefault(item.label, []).append(symbols)
        windows.setdefault(item.label, []).append(partition_windows(symbols, window_len))
    stacked = {label: np.concatenate(w) for label, w in windows.items()}
    return stacked, sequences, skipped


def prepare_split(split: DatasetSplit, codebook: Codebook, window_len: int = defs.BUFFER_LEN,
        idle_symbols: FrozenSet[int] = frozenset()) -> PreparedWindows:
    train, train_sequences, skipped_train = _windows_by_label(split.train, codebook, idle_symbols, window_len)
    test, test_sequences, skipped_test = _windows_by_label(split.test, codebook, idle_symbols, window_len)
    skipped = skipped_train + skipped_test
    if skipped:
        logger.warning(f'{skipped} sequences were empty after removing idle symbols')
    return PreparedWindows(train, test, train_sequences, test_sequences, skipped)


def prepare_windows(dataset: Dataset, codebook: Codebook, window_len: int = defs.BUFFER_LEN,
        idle_symbols: FrozenSet[int] = frozenset(), rng_seed: int = 0) -> PreparedWindows:
    """
    Quantize, strip idle symbols from non-idle items, split half/half per
    label and cut every sequence into @window_len windows.
    """
    return prepare_split(split_dataset(dataset, rng_seed), codebook, window_len, frozenset(idle_symbols))


# =================================================================
# Simple layer
# =================================================================

def train_simple_layer(train_windows: Mapping[GestureLabel, Sequence[Sequence[int]]], n_states: int,
        n_symbols: int, rng_seed: int, max_iterations: int = defs.BW_MAX_ITERATIONS,
        tolerance: float = defs.BW_TOLERANCE) -> SimpleLayer:
    """
    One left-right HMM per simple label, trained on that label's windows only.
    """
    if n_states < defs.N_MIN or n_symbols < defs.M_MIN:
        raise InvalidArgumentError(f'Simple layer needs N >= {defs.N_MIN} and M >= {defs.M_MIN}, '
                f'got N={n_states} M={n_symbols}')
    missing = [l.display_name for l in SIMPLE_LABELS if len(train_windows.get(l, ())) == 0]
    if missing:
        raise ValidationError('Missing training windows', [f'no windows for {name}' for name in missing])

    models = []
    for label in SIMPLE_LABELS:
        hmm = init_left_right(n_states, n_symbols, derive_seed(rng_seed, label))
        hmm, report = baum_welch(hmm, train_windows[label], max_iterations, tolerance)
        logger.debug(f'{label.display_name}: N={n_states} M={n_symbols} trained in {report.iterations_run} '
                f'iterations, log-likelihood {report.log_likelihood_history[-1]:.4f}')
        models.append(hmm)
    return tuple(models)


def _check_layer(models: SimpleLayer) -> None:
    if len(models) != len(SIMPLE_LABELS):
        raise InvalidArgumentError(f'Expected {len(SIMPLE_LABELS)} simple models, got {len(models)}')


def classify_simple_window(models: SimpleLayer, window: Sequence[int],
        window_len: int = defs.BUFFER_LEN) -> Tuple[GestureLabel, np.ndarray]:
    """
    The simple label whose model scores @window highest, and all 7 scores.
    Ties go to the lowest label.
    """
    _check_layer(models)
    if len(window) != window_len:
        raise InvalidArgumentError(f'Window has {len(window)} symbols, expected {window_len}')
    scores = np.array([forward_log_likelihood(hmm, window) for hmm in models])
    return GestureLabel(int(np.argmax(scores)) + 1), scores


def classify_simple_windows(models: SimpleLayer, windows: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Batch form of classify_simple_window over a W x L array of windows.
    Returns (labels, W x 7 scores).
    """
    _check_layer(models)
    windows = np.asarray(windows)
    if windows.shape[0] == 0:
        return np.zeros(0, dtype=np.int64), np.zeros((0, len(models)))
    scores = np.stack([forward_log_likelihood_batch(hmm, windows) for hmm in models], axis=1)
    return np.argmax(scores, axis=1) + 1, scores


def simple_confusion(models: SimpleLayer, windows: Mapping[GestureLabel, np.ndarray]) -> ConfusionMatrix:
    pairs = []
    for label in SIMPLE_LABELS:
        if label not in windows:
            continue
        predicted, _ = classify_simple_windows(models, windows[label])
        pairs.extend((label, p) for p in predicted)
    return confusion_matrix(pairs, SIMPLE_LABELS)


def evaluate_simple_layer(models: SimpleLayer, items: Iterable[LabeledGesture], codebook: Codebook,
        idle_symbols: FrozenSet[int], window_len: int = defs.BUFFER_LEN) -> ConfusionMatrix:
    items = [i for i in items if i.label.is_simple]
    windows, _, _ = _windows_by_label(items, codebook, idle_symbols, window_len)
    return simple_confusion(models, windows)


# =================================================================
# Complex layer
# =================================================================

def map_meta_symbols(meta_sequence: Iterable[int], alphabet: Mapping[GestureLabel, int]) -> np.ndarray:
    return np.array([alphabet.get(GestureLabel(m), 1) for m in meta_sequence], dtype=np.int64)


def runtime_meta_sequence(item: LabeledGesture, models: SimpleLayer, codebook: Codebook,
        window_len: int = defs.BUFFER_LEN) -> np.ndarray:
    """
    The labels a cascade streaming @item would enqueue: every window of the
    unstripped recording classified by the simple layer, leaning dropped.
    """
    windows = partition_windows(quantize_sequence(codebook, item.motion.omega), window_len)
    labels, _ = classify_simple_windows(models, windows)
    return np.array([l for l in labels if GestureLabel(l) in QUEUED_LABELS], dtype=np.int64)


def swing_window(meta_sequence: Sequence[int], alphabet: Mapping[GestureLabel, int],
        queue_len: int = defs.QUEUE_LEN) -> Optional[np.ndarray]:
    """
    The queue at the end of the first back-and-forth in @meta_sequence.

    The queue starts full of Idle, as after a rest. It is taken at the last
    label of the second run of labels on @alphabet's axis, before the
    direction changes again. None if the sequence never changes direction
    on that axis.
    """
    padded = np.concatenate([np.full(queue_len, int(GestureLabel.BEING_IDLE), dtype=np.int64),
            np.asarray(meta_sequence, dtype=np.int64)])
    mapped = map_meta_symbols(padded, alphabet)
    runs, previous, end = 0, None, None
    for i, symbol in enumerate(mapped):
        if symbol == 1:
            continue
        if symbol != previous:
            runs += 1
            previous = symbol
        if runs > 2:
            break
        if runs == 2:
            end = i
    if end is None:
        return None
    return padded[end + 1 - queue_len:end + 1]


def swing_windows(items: Iterable[LabeledGesture], models: SimpleLayer, codebook: Codebook,
        window_len: int = defs.BUFFER_LEN,
        queue_len: int = defs.QUEUE_LEN) -> Dict[GestureLabel, List[Optional[np.ndarray]]]:
    """
    swing_window of every Shaking and Nodding item on its own axis, keyed by
    label, in item order.
    """
    alphabets = {GestureLabel.SHAKING: SHAKE_ALPHABET, GestureLabel.NODDING: NOD_ALPHABET}
    windows: Dict[GestureLabel, List[Optional[np.ndarray]]] = {label: [] for label in COMPLEX_LABELS}
    for item in items:
        if item.label.is_complex:
            meta = runtime_meta_sequence(item, models, codebook, window_len)
            windows[item.label].append(swing_window(meta, alphabets[item.label], queue_len))
    return windows


def complex_scores(calib: ComplexCalibration, meta_sequence: Sequence[int],
        queue_len: int = defs.QUEUE_LEN) -> np.ndarray:
    """
    P_c: log-likelihoods of @meta_sequence under the Shaking and Nodding models.
    """
    if len(meta_sequence) != queue_len:
        raise InvalidArgumentError(f'Meta-sequence has {len(meta_sequence)} symbols, expected {queue_len}')
    return np.array([
        forward_log_likelihood(calib.shake_hmm, map_meta_symbols(meta_sequence, SHAKE_ALPHABET)),
        forward_log_likelihood(calib.nod_hmm, map_meta_symbols(meta_sequence, NOD_ALPHABET)),
    ])


def select_complex(p_c: Sequence[float], tau_shake: float, tau_nod: float) -> int:
    """
    Shaking or Nodding if either score clears its threshold, else REJECTED.
    """
    if p_c[0] > tau_shake or p_c[1] > tau_nod:
        return GestureLabel.SHAKING if p_c[0] >= p_c[1] else GestureLabel.NODDING
    return REJECTED


def classify_complex_sequence(calib: ComplexCalibration, meta_sequence: Sequence[int],
        queue_len: int = defs.QUEUE_LEN) -> int:
    return select_complex(complex_scores(calib, meta_sequence, queue_len), calib.tau_shake, calib.tau_nod)


def calibrate_complex_layer(items: Iterable[LabeledGesture], models: SimpleLayer, codebook: Codebook,
        n_states: int = defs.COMPLEX_N_STATES, rng_seed: int = 0, window_len: int = defs.BUFFER_LEN,
        queue_len: int = defs.QUEUE_LEN, max_iterations: int = defs.BW_MAX_ITERATIONS,
        tolerance: float = defs.BW_TOLERANCE) -> ComplexCalibration:
    """
    Train the Shaking and Nodding models on the queues the runtime holds at
    the end of each training gesture's first back-and-forth, and set each
    threshold to the lowest training score.
    """
    windows = swing_windows(items, models, codebook, window_len, queue_len)
    trained = {}
    for label, alphabet in ((GestureLabel.SHAKING, SHAKE_ALPHABET), (GestureLabel.NODDING, NOD_ALPHABET)):
        found = [w for w in windows[label] if w is not None]
        if len(found) < len(windows[label]):
            logger.warning(f'{label.display_name}: {len(windows[label]) - len(found)} of {len(windows[label])} '
                    f'training items never change direction and are left out')
        if not found:
            raise ValidationError('Cannot calibrate complex layer', [f'no swing windows for {label.display_name}'])
        observations = np.stack([map_meta_symbols(w, alphabet) for w in found])
        hmm = init_left_right(n_states, defs.COMPLEX_N_SYMBOLS, derive_seed(rng_seed, label))
        hmm, _ = baum_welch(hmm, observations, max_iterations, tolerance)
        tau = float(forward_log_likelihood_batch(hmm, observations).min()) - THRESHOLD_MARGIN
        logger.training(f'{label.display_name}: calibrated threshold {tau:.4f} over {len(observations)} windows')
        trained[label] = (hmm, tau)

    shake_hmm, tau_shake = trained[GestureLabel.SHAKING]
    nod_hmm, tau_nod = trained[GestureLabel.NODDING]
    return ComplexCalibration(shake_hmm, nod_hmm, tau_shake, tau_nod)


def evaluate_complex_layer(calib: ComplexCalibration, models: SimpleLayer, items: Iterable[LabeledGesture],
        codebook: Codebook, window_len: int = defs.BUFFER_LEN,
        queue_len: int = defs.QUEUE_LEN) -> ConfusionMatrix:
    """
    Threshold classification of each complex item's swing window. An item
    with no direction change counts as rejected.
    """
    pairs = []
    for label, windows in swing_windows(items, models, codebook, window_len, queue_len).items():
        for window in windows:
            if window is None:
                pairs.append((label, REJECTED))
                continue
            pairs.append((label, classify_complex_sequence(calib, window, queue_len)))
    return confusion_matrix(pairs, COMPLEX_LABELS)


# =================================================================
# Grid search
# =================================================================

def fit_session_codebook(split: DatasetSplit, session: int, n_symbols: int,
        rng_seed: int) -> Tuple[Codebook, FrozenSet[int]]:
    """
    A fresh K = @n_symbols codebook over the training half for one session,
    with its idle symbols.
    """
    vectors = np.concatenate([item.motion.omega for item in split.train])
    codebook = kmeans_fit(vectors, n_symbols, derive_seed(rng_seed, 1, session, n_symbols))
    idle_items = [item for item in split.train if item.label == GestureLabel.BEING_IDLE]
    return codebook, identify_idle_symbols(idle_items, codebook)


def train_simple_cell(split: DatasetSplit, session: int, n_states: int, n_symbols: int, rng_seed: int,
        window_len: int = defs.BUFFER_LEN, codebook: Optional[Codebook] = None,
        idle_symbols: Optional[FrozenSet[int]] = None) -> SimpleLayerFit:
    if codebook is None:
        codebook, idle_symbols = fit_session_codebook(split, session, n_symbols, rng_seed)
    prepared = prepare_split(split, codebook, window_len, idle_symbols or frozenset())
    simple_train = {label: prepared.train.get(label, ()) for label in SIMPLE_LABELS}
    models = train_simple_layer(simple_train, n_states, n_symbols, derive_seed(rng_seed, 2, session, n_states, n_symbols))
    confusion = simple_confusion(models, prepared.test)
    accuracy = macro_metrics(confusion).average_accuracy if confusion.total else 0.0
    return SimpleLayerFit(session, n_states, n_symbols, codebook, frozenset(idle_symbols or ()),
            models, confusion, accuracy)


def _grid_task(args: Tuple) -> List[Tuple[int, int, int, Optional[float]]]:
    split, session, n_symbols, n_values, rng_seed, window_len = args
    codebook, idle_symbols = fit_session_codebook(split, session, n_symbols, rng_seed)
    out = []
    for n_states in n_values:
        try:
            fit = train_simple_cell(split, session, n_states, n_symbols, rng_seed, window_len, codebook, idle_symbols)
        except ValidationError as e:
            logger.warning(f'session {session} N={n_states} M={n_symbols} cannot be trained: {e}')
            out.append((session, n_states, n_symbols, None))
            continue
        out.append((session, n_states, n_symbols, fit.accuracy))
    return out


def _grid_values(name: str, bounds: Tuple[int, int], values: Optional[Sequence[int]], minimum: int) -> List[int]:
    if values is not None:
        values = sorted({int(v) for v in values})
        if not values or values[0] < minimum:
            raise InvalidArgumentError(f'Invalid {name} values {values}, need every value >= {minimum}')
        return values
    lo, hi = (int(b) for b in bounds)
    if lo < minimum or hi < lo:
        raise InvalidArgumentError(f'Invalid {name} range [{lo}, {hi}], need {minimum} <= min <= max')
    return list(range(lo, hi + 1))


def grid_search(dataset: Dataset, n_range: Tuple[int, int] = (defs.N_MIN, defs.N_MAX),
        m_range: Tuple[int, int] = (defs.M_MIN, defs.M_MAX), sessions: int = defs.SESSIONS,
        rng_seed: int = 0, workers: int = 1, window_len: int = defs.BUFFER_LEN,
        n_values: Optional[Sequence[int]] = None, m_values: Optional[Sequence[int]] = None) -> GridSearchResult:
    """
    Train and score the simple layer for every (session, N, M) cell.

    Each session fits one codebook per M and reuses it across N. The best
    cell maximizes held-out average accuracy; near-ties prefer the smallest
    M, then the smallest N, then the earliest session. @n_values and
    @m_values replace the ranges with explicit values. A cell that cannot
    be trained scores 0 and is never chosen.
    """
    n_values = _grid_values('N', n_range, n_values, defs.N_MIN)
    m_values = _grid_values('M', m_range, m_values, defs.M_MIN)
    if sessions < 1:
        raise InvalidArgumentError(f'sessions must be >= 1, got {sessions}')

    split = split_dataset(dataset, derive_seed(rng_seed, 0))
    tasks = [(split, session, m, tuple(n_values), rng_seed, window_len)
            for session in range(sessions) for m in m_values]
    logger.training(f'Grid search over N={",".join(map(str, n_values))} M={",".join(map(str, m_values))} '
            f'with {sessions} sessions ({len(tasks)} codebooks)')

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(_grid_task, tasks))
    else:
        outputs = [_grid_task(task) for task in tasks]

    cells: Dict[Tuple[int, int, int], float] = {}
    trainable = []
    for output in outputs:
        for session, n, m, accuracy in output:
            if accuracy is None:
                cells[(session, n, m)] = 0.0
                continue
            cells[(session, n, m)] = accuracy
            trainable.append((session, n, m))
            logger.training(f'session {session} N={n} M={m}: average accuracy {accuracy:.4f}')
    if not trainable:
        raise ValidationError('No grid cell could be trained', [f'{len(cells)} cells lack windows for a simple label'])

    best_accuracy = max(cells[c] for c in trainable)
    candidates = [c for c in trainable if cells[c] >= best_accuracy - 1e-12]
    session, n, m = min(candidates, key=lambda c: (c[2], c[1], c[0]))

    table: Dict[Tuple[int, int], float] = {}
    for (_, cn, cm), accuracy in cells.items():
        table[(cn, cm)] = max(table.get((cn, cm), 0.0), accuracy)

    best_model = train_simple_cell(split, session, n, m, rng_seed, window_len)
    logger.training(f'Best cell: N={n} M={m} session {session} with average accuracy {cells[(session, n, m)]:.4f}')
    return GridSearchResult(table, cells, n, m, session, cells[(session, n, m)], best_model, split)


# =================================================================
# Model assembly and reports
# =================================================================

def assemble_cascade_model(fit: SimpleLayerFit, split: DatasetSplit, rng_seed: int = 0,
        runtime_tau_shake: float = defs.RUNTIME_TAU_SHAKE, runtime_tau_nod: float = defs.RUNTIME_TAU_NOD,
        window_len: int = defs.BUFFER_LEN, queue_len: int = defs.QUEUE_LEN):
    """
    Calibrate the complex layer on the training half and package a CascadeModel.
    """
    from chmm.cascade import CascadeModel

    calib = calibrate_complex_layer(split.train, fit.simple_models, fit.codebook,
            rng_seed=derive_seed(rng_seed, 3), window_len=window_len, queue_len=queue_len)
    rates = {item.motion.sample_rate_hz for item in split.train}
    model = CascadeModel(
        codebook=fit.codebook,
        simple_models=fit.simple_models,
        complex=calib,
        idle_symbols=fit.idle_symbols,
        runtime_tau_shake=runtime_tau_shake,
        runtime_tau_nod=runtime_tau_nod,
        buffer_len=window_len,
        queue_len=queue_len,
        sample_rate_hz=rates.pop() if len(rates) == 1 else defs.SAMPLE_RATE_HZ,
    )
    model.validate()
    return model


def build_cascade_model(dataset: Dataset, n_states: int, n_symbols: int, rng_seed: int = 0, session: int = 0,
        runtime_tau_shake: float = defs.RUNTIME_TAU_SHAKE, runtime_tau_nod: float = defs.RUNTIME_TAU_NOD,
        window_len: int = defs.BUFFER_LEN, queue_len: int = defs.QUEUE_LEN):
    """
    Train a single (N, M) cell end to end and return a CascadeModel.
    """
    split = split_dataset(dataset, derive_seed(rng_seed, 0))
    fit = train_simple_cell(split, session, n_states, n_symbols, rng_seed, window_len)
    logger.training(f'N={n_states} M={n_symbols}: simple-layer average accuracy {fit.accuracy:.4f}')
    return assemble_cascade_model(fit, split, rng_seed, runtime_tau_shake, runtime_tau_nod, window_len, queue_len)


def write_grid_report(result: GridSearchResult, path: str) -> None:
    try:
        with open(path, 'w', newline='', encoding='utf-8') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(['N', 'M', 'session', 'average_accuracy'])
            for (session, n, m) in sorted(result.cells, key=lambda c: (c[1], c[2], c[0])):
                writer.writerow([n, m, session, repr(result.cells[(session, n, m)])])
    except OSError as e:
        raise ArtifactIOError(path, e.strerror or str(e)) from e


def format_summary(result: GridSearchResult, calib: Optional[ComplexCalibration] = None,
        complex_metrics: Optional[MacroMetrics] = None) -> str:
    """
    Human readable summary: the accuracy table (best session per cell), the
    best cell and the calibrated thresholds.
    """
    ns = sorted({n for n, _ in result.accuracy_table})
    ms = sorted({m for _, m in result.accuracy_table})
    rows = [[f'M={m}'] + [result.accuracy_table.get((n, m)) for n in ns] for m in ms]
    lines = [
        tabulate(rows, headers=[''] + [f'N={n}' for n in ns], floatfmt='.4f'),
        '',
        f'Best cell: N={result.best_n} M={result.best_m} (session {result.best_session}), '
        f'average accuracy {result.best_accuracy:.4f}',
    ]
    if calib is not None:
        lines.append(f'Calibrated thresholds: tau_shake={calib.tau_shake:.4f} tau_nod={calib.tau_nod:.4f}')
    if complex_metrics is not None:
        lines.append(f'Complex layer: precision {complex_metrics.precision:.4f} recall {complex_metrics.recall:.4f} '
                f'average accuracy {complex_metrics.average_accuracy:.4f}')
    return '\n'.join(lines)
