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

    Classification metrics, motion onset detection and latency tables.

    2026-Oct-19  CHMM developers  Created this.
"""

import csv
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from tabulate import tabulate

from chmm.errors import ArtifactIOError, InvalidArgumentError
from chmm.structs import GestureLabel, MotionSequence, REJECTED
from chmm import defs


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """
    counts[t][p] counts pairs with true class t and predicted class p.
    rejected[t] counts true class t predictions that were rejected (-1).
    """
    counts: np.ndarray
    class_labels: Tuple[int, ...]
    rejected: np.ndarray

    def __post_init__(self):
        labels = tuple(int(l) for l in self.class_labels)
        counts = np.array(self.counts, dtype=np.int64)
        rejected = np.array(self.rejected, dtype=np.int64)
        c = len(labels)
        if counts.shape != (c, c) or rejected.shape != (c,):
            raise InvalidArgumentError(f'Confusion matrix shape {counts.shape} does not match {c} classes')
        counts.setflags(write=False)
        rejected.setflags(write=False)
        object.__setattr__(self, 'class_labels', labels)
        object.__setattr__(self, 'counts', counts)
        object.__setattr__(self, 'rejected', rejected)

    @property
    def total(self) -> int:
        return int(self.counts.sum() + self.rejected.sum())

    def __add__(self, other: 'ConfusionMatrix') -> 'ConfusionMatrix':
        if self.class_labels != other.class_labels:
            raise InvalidArgumentError('Cannot add confusion matrices over different classes')
        return ConfusionMatrix(self.counts + other.counts, self.class_labels, self.rejected + other.rejected)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConfusionMatrix):
            return NotImplemented
        return (self.class_labels == other.class_labels
                and np.array_equal(self.counts, other.counts)
                and np.array_equal(self.rejected, other.rejected))


@dataclass(frozen=True)
class ClassMetrics:
    label: int
    precision: float
    recall: float
    accuracy: float


@dataclass(frozen=True)
class MacroMetrics:
    precision: float
    recall: float
    average_accuracy: float
    per_class: Tuple[ClassMetrics, ...] = ()


@dataclass(frozen=True)
class LatencyRecord:
    gesture: GestureLabel
    onset_frame: int
    trigger_frame: int
    latency_s: float

    def __post_init__(self):
        object.__setattr__(self, 'gesture', GestureLabel(self.gesture))
        if self.trigger_frame < self.onset_frame:
            raise InvalidArgumentError(f'Trigger frame {self.trigger_frame} precedes onset {self.onset_frame}')


def confusion_matrix(pairs: Iterable[Tuple[int, int]], class_labels: Sequence[int]) -> ConfusionMatrix:
    """
    Tally (true, predicted) @pairs. A predicted -1 goes to the rejected vector.
    """
    labels = tuple(int(l) for l in class_labels)
    if not labels or len(set(labels)) != len(labels):
        raise InvalidArgumentError('Class labels must be distinct and non-empty')
    index = {label: i for i, label in enumerate(labels)}
    counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
    rejected = np.zeros(len(labels), dtype=np.int64)
    for true, predicted in pairs:
        true, predicted = int(true), int(predicted)
        if true not in index:
            raise InvalidArgumentError(f'True label {true} is not one of {labels}')
        if predicted == REJECTED:
            rejected[index[true]] += 1
            continue
        if predicted not in index:
            raise InvalidArgumentError(f'Predicted label {predicted} is not one of {labels}')
        counts[index[true], index[predicted]] += 1
    return ConfusionMatrix(counts, labels, rejected)


def macro_metrics(m: ConfusionMatrix) -> MacroMetrics:
    """
    Macro-averaged precision, recall and average accuracy.
    Undefined per-class ratios count as 0. Rejections are misses of the true class.
    """
    total = m.total
    if total == 0:
        raise InvalidArgumentError('Cannot compute metrics of an empty confusion matrix')
    tp = np.diag(m.counts).astype(np.float64)
    fp = m.counts.sum(axis=0) - tp
    fn = m.counts.sum(axis=1) + m.rejected - tp
    tn = total - tp - fp - fn

    with np.errstate(divide='ignore', invalid='ignore'):
        precision = np.where(tp + fp > 0, tp / (tp + fp), 0.0)
        recall = np.where(tp + fn > 0, tp / (tp + fn), 0.0)
    accuracy = (tp + tn) / total

    per_class = tuple(ClassMetrics(label, float(p), float(r), float(a))
            for label, p, r, a in zip(m.class_labels, precision, recall, accuracy))
    return MacroMetrics(float(precision.mean()), float(recall.mean()), float(accuracy.mean()), per_class)


def detect_motion_onset(motion: MotionSequence, omega_init: float = defs.OMEGA_INIT) -> Optional[int]:
    """
    Frame index of the first sample with |omega| >= @omega_init, or None.
    """
    if not omega_init > 0:
        raise InvalidArgumentError(f'omega_init must be positive, got {omega_init}')
    if not len(motion):
        return None
    squared = np.sum(motion.omega * motion.omega, axis=1)
    hits = np.nonzero(squared >= omega_init * omega_init)[0]
    if not hits.size:
        return None
    return int(motion.frames[hits[0]])


def estimate_latency(onset_frame: int, trigger_frame: int, f_s: float = defs.SAMPLE_RATE_HZ) -> float:
    if not f_s > 0:
        raise InvalidArgumentError(f'Sample rate must be positive, got {f_s}')
    if trigger_frame < onset_frame:
        raise InvalidArgumentError(f'Trigger frame {trigger_frame} precedes onset {onset_frame}')
    return (trigger_frame - onset_frame) / f_s


def latency_record(gesture: GestureLabel, onset_frame: int, trigger_frame: int,
        f_s: float = defs.SAMPLE_RATE_HZ) -> LatencyRecord:
    return LatencyRecord(gesture, onset_frame, trigger_frame, estimate_latency(onset_frame, trigger_frame, f_s))


def _label_name(label: int) -> str:
    if label == REJECTED:
        return 'Rejected'
    return GestureLabel(label).display_name


def metrics_rows(layer: str, metrics: MacroMetrics) -> List[List]:
    rows = [[f'{layer}:{_label_name(c.label)}', c.precision, c.recall, c.accuracy] for c in metrics.per_class]
    rows.append([f'{layer}:macro', metrics.precision, metrics.recall, metrics.average_accuracy])
    return rows


def write_metrics_report(path: str, layers: Mapping[str, MacroMetrics]) -> None:
    """
    class,precision,recall rows for each layer in @layers: one per class,
    the macro precision and recall, then a summary row carrying the
    layer's average accuracy in the precision column.
    """
    try:
        with open(path, 'w', newline='', encoding='utf-8') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(['class', 'precision', 'recall'])
            for layer, metrics in layers.items():
                for row in metrics_rows(layer, metrics):
                    writer.writerow([row[0], repr(float(row[1])), repr(float(row[2]))])
                writer.writerow([f'{layer}:average_accuracy', repr(float(metrics.average_accuracy)), ''])
    except OSError as e:
        raise ArtifactIOError(path, e.strerror or str(e)) from e


def format_metrics(layers: Mapping[str, MacroMetrics]) -> str:
    rows = []
    for layer, metrics in layers.items():
        rows.extend(metrics_rows(layer, metrics))
    return tabulate(rows, headers=['class', 'precision', 'recall', 'accuracy'], floatfmt='.4f')


LATENCY_COLUMNS = tuple(l for l in GestureLabel if l != GestureLabel.BEING_IDLE)


def latency_table(rows: Mapping[str, Mapping[GestureLabel, float]]) -> List[List[str]]:
    """
    Rows shaped participant,RL,RR,TU,TD,LL,LR,S,N followed by mean and std rows.
    Missing cells are left empty and ignored by the summary rows.
    """
    header = ['participant'] + [l.abbreviation for l in LATENCY_COLUMNS]
    values = np.full((len(rows), len(LATENCY_COLUMNS)), np.nan)
    for i, latencies in enumerate(rows.values()):
        for j, label in enumerate(LATENCY_COLUMNS):
            if label in latencies and latencies[label] is not None:
                values[i, j] = latencies[label]

    def fmt(v: float) -> str:
        return '' if np.isnan(v) else f'{v:.3f}'

    table = [header]
    for name, row in zip(rows, values):
        table.append([name] + [fmt(v) for v in row])
    for summary, fn in (('mean', np.mean), ('std', np.std)):
        cells = []
        for column in values.T:
            present = column[~np.isnan(column)]
            cells.append(fmt(fn(present)) if present.size else '')
        table.append([summary] + cells)
    return table


def write_latency_table(path: str, rows: Mapping[str, Mapping[GestureLabel, float]]) -> None:
    try:
        with open(path, 'w', newline='', encoding='utf-8') as f:
            csv.writer(f, lineterminator='\n').writerows(latency_table(rows))
    except OSError as e:
        raise ArtifactIOError(path, e.strerror or str(e)) from e


def latencies_by_gesture(records: Iterable[LatencyRecord]) -> Dict[GestureLabel, float]:
    """
    Mean latency per gesture over @records.
    """
    grouped: Dict[GestureLabel, List[float]] = {}
    for record in records:
        grouped.setdefault(record.gesture, []).append(record.latency_s)
    return {label: float(np.mean(v)) for label, v in grouped.items()}


def evaluate_model(model, dataset) -> Dict[str, MacroMetrics]:
    """
    Simple-layer metrics over every window of labels 1-7 and complex-layer
    metrics over the swing window of every label 8 and 9 item in @dataset.
    """
    from chmm.training import evaluate_simple_layer, evaluate_complex_layer

    simple = evaluate_simple_layer(model.simple_models, dataset.items, model.codebook,
            model.idle_symbols, model.buffer_len)
    complex_ = evaluate_complex_layer(model.complex, model.simple_models, dataset.items, model.codebook,
            model.buffer_len, model.queue_len)
    layers = {}
    if simple.total:
        layers['simple'] = macro_metrics(simple)
    if complex_.total:
        layers['complex'] = macro_metrics(complex_)
    return layers
