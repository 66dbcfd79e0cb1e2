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

    Test confusion matrices, macro metrics, latency and reports.

    2026-Oct-19  CHMM developers  Created this.
"""
import csv
import os

import numpy as np
import pytest

from chmm.errors import InvalidArgumentError
from chmm.evaluation import (ConfusionMatrix, LATENCY_COLUMNS, confusion_matrix, detect_motion_onset,
        estimate_latency, evaluate_model, format_metrics, latencies_by_gesture, latency_record, latency_table,
        macro_metrics, write_latency_table, write_metrics_report)
from chmm.structs import GestureLabel, MotionSequence, REJECTED


def reference_metrics(counts):
    """
    Per-class ratios computed one class at a time.
    """
    c = len(counts)
    total = sum(map(sum, counts))
    precision, recall, accuracy = [], [], []
    for k in range(c):
        tp = counts[k][k]
        fp = sum(counts[t][k] for t in range(c)) - tp
        fn = sum(counts[k]) - tp
        tn = total - tp - fp - fn
        precision.append(tp / (tp + fp) if tp + fp else 0.0)
        recall.append(tp / (tp + fn) if tp + fn else 0.0)
        accuracy.append((tp + tn) / total)
    return sum(precision) / c, sum(recall) / c, sum(accuracy) / c


def pairs_for(counts, labels):
    return [(labels[t], labels[p]) for t in range(len(labels)) for p in range(len(labels))
            for _ in range(counts[t][p])]


def test_two_class_metrics():
    """
    A 2 x 2 matrix gives the hand-computed macro values.
    """
    m = confusion_matrix(pairs_for([[2, 1], [0, 3]], [8, 9]), [8, 9])
    assert m.counts.tolist() == [[2, 1], [0, 3]]
    metrics = macro_metrics(m)
    assert metrics.precision == pytest.approx(0.875)
    assert metrics.recall == pytest.approx(5 / 6)
    assert metrics.average_accuracy == pytest.approx(5 / 6)
    assert [c.label for c in metrics.per_class] == [8, 9]


def test_random_metrics_match_reference():
    """
    Vectorized metrics agree with a per-class computation.
    """
    rng = np.random.default_rng(0)
    for _ in range(50):
        counts = rng.integers(0, 10, size=(3, 3)).tolist()
        if not sum(map(sum, counts)):
            continue
        metrics = macro_metrics(confusion_matrix(pairs_for(counts, [1, 2, 3]), [1, 2, 3]))
        precision, recall, accuracy = reference_metrics(counts)
        assert metrics.precision == pytest.approx(precision)
        assert metrics.recall == pytest.approx(recall)
        assert metrics.average_accuracy == pytest.approx(accuracy)


def test_rejections_are_misses():
    """
    A rejected prediction lowers the true class's recall and nobody's precision.
    """
    m = confusion_matrix([(8, 8), (8, REJECTED), (9, 9), (9, 9)], [8, 9])
    assert m.rejected.tolist() == [1, 0]
    assert m.total == 4
    metrics = macro_metrics(m)
    assert metrics.precision == pytest.approx(1.0)
    assert metrics.recall == pytest.approx(0.75)
    assert [c.accuracy for c in metrics.per_class] == pytest.approx([0.75, 1.0])


def test_undefined_ratios_are_zero():
    """
    A class that is never predicted and never present scores 0 precision and recall.
    """
    metrics = macro_metrics(confusion_matrix([(1, 1), (1, 1)], [1, 2]))
    assert metrics.per_class[1].precision == 0.0
    assert metrics.per_class[1].recall == 0.0
    assert metrics.per_class[1].accuracy == 1.0
    assert metrics.precision == pytest.approx(0.5)


def test_confusion_errors():
    """
    Unknown labels and empty matrices are refused.
    """
    with pytest.raises(InvalidArgumentError):
        confusion_matrix([(3, 1)], [1, 2])
    with pytest.raises(InvalidArgumentError):
        confusion_matrix([(1, 3)], [1, 2])
    with pytest.raises(InvalidArgumentError):
        confusion_matrix([], [1, 1])
    with pytest.raises(InvalidArgumentError):
        macro_metrics(confusion_matrix([], [1, 2]))
    with pytest.raises(InvalidArgumentError):
        ConfusionMatrix([[1]], (1, 2), [0, 0])


def test_confusion_addition():
    """
    Matrices over the same classes add cell by cell.
    """
    a = confusion_matrix([(1, 2), (2, REJECTED)], [1, 2])
    b = confusion_matrix([(1, 1)], [1, 2])
    assert (a + b).counts.tolist() == [[1, 1], [0, 0]]
    assert (a + b).rejected.tolist() == [0, 1]
    with pytest.raises(InvalidArgumentError):
        a + confusion_matrix([], [1, 3])


def test_latency():
    """
    Latency is the frame distance over the sample rate.
    """
    assert estimate_latency(100, 116) == pytest.approx(16 / 75)
    assert estimate_latency(100, 152) == pytest.approx(52 / 75)
    assert estimate_latency(5, 5) == 0.0
    record = latency_record(GestureLabel.NODDING, 40, 92)
    assert record.latency_s == pytest.approx(0.6933, abs=1e-4)
    with pytest.raises(InvalidArgumentError):
        estimate_latency(10, 9)
    with pytest.raises(InvalidArgumentError):
        estimate_latency(0, 1, f_s=0)


def test_motion_onset():
    """
    Onset is the first frame at or above the velocity threshold.
    """
    omega = np.zeros((20, 3))
    omega[7] = [0.0, 0.1, 0.0]
    motion = MotionSequence.from_array(omega, first_frame=100)
    assert detect_motion_onset(motion, 0.1) == 107
    assert detect_motion_onset(motion, 0.11) is None
    assert detect_motion_onset(MotionSequence.from_array(np.zeros((0, 3)))) is None
    with pytest.raises(InvalidArgumentError):
        detect_motion_onset(motion, 0.0)


def test_latency_table(tmp_path):
    """
    The table has one row per participant plus mean and std rows; gaps stay empty.
    """
    rows = {
        'p01': {GestureLabel.ROTATING_LEFT: 0.2, GestureLabel.SHAKING: 1.0},
        'p02': {GestureLabel.ROTATING_LEFT: 0.4},
    }
    table = latency_table(rows)
    assert table[0] == ['participant', 'RL', 'RR', 'TU', 'TD', 'LL', 'LR', 'S', 'N']
    assert len(table) == 5
    assert table[1][1] == '0.200'
    assert table[2][7] == ''
    assert table[3] == ['mean', '0.300', '', '', '', '', '', '1.000', '']
    assert table[4][1] == '0.100'
    assert len(LATENCY_COLUMNS) == 8

    path = os.path.join(tmp_path, 'latency.csv')
    write_latency_table(path, rows)
    with open(path) as f:
        assert list(csv.reader(f)) == table


def test_latencies_by_gesture():
    """
    Latencies average per gesture.
    """
    records = [latency_record(GestureLabel.ROTATING_LEFT, 0, 15), latency_record(GestureLabel.ROTATING_LEFT, 0, 30),
            latency_record(GestureLabel.SHAKING, 0, 75)]
    means = latencies_by_gesture(records)
    assert means[GestureLabel.ROTATING_LEFT] == pytest.approx(0.3)
    assert means[GestureLabel.SHAKING] == pytest.approx(1.0)


def test_metrics_report(tmp_path):
    """
    The report lists each class, the macro scores and the average accuracy
    of each layer.
    """
    simple = macro_metrics(confusion_matrix([(1, 1), (2, 2), (2, 1)], [1, 2]))
    complex_ = macro_metrics(confusion_matrix([(8, 8), (9, REJECTED)], [8, 9]))
    path = os.path.join(tmp_path, 'metrics.csv')
    write_metrics_report(path, {'simple': simple, 'complex': complex_})
    with open(path) as f:
        rows = list(csv.reader(f))
    assert rows[0] == ['class', 'precision', 'recall']
    assert [r[0] for r in rows[1:]] == ['simple:BeingIdle', 'simple:RotatingLeft', 'simple:macro',
            'simple:average_accuracy', 'complex:Shaking', 'complex:Nodding', 'complex:macro',
            'complex:average_accuracy']
    assert all(len(r) == 3 for r in rows)
    assert float(rows[3][1]) == pytest.approx(simple.precision)
    assert float(rows[4][1]) == pytest.approx(simple.average_accuracy)
    assert rows[4][2] == ''
    text = format_metrics({'simple': simple})
    assert 'simple:macro' in text


def test_evaluate_model(model, dataset):
    """
    Both layers are scored on a dataset and the simple layer does well.
    """
    layers = evaluate_model(model, dataset)
    assert set(layers) == {'simple', 'complex'}
    assert layers['simple'].average_accuracy >= 0.9
    assert len(layers['simple'].per_class) == 7
    assert len(layers['complex'].per_class) == 2
