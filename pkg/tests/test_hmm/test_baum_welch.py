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

    Test Baum-Welch training.

    2026-Oct-19  CHMM developers  Created this.
"""
import numpy as np
import pytest

from chmm.errors import InvalidArgumentError
from chmm.hmm import (DiscreteHmm, baum_welch, floor_rows, init_left_right, left_right_mask, sample_sequences,
        validate_hmm)
from chmm import defs


def assert_monotone(history):
    assert all(b - a >= -1e-10 for a, b in zip(history, history[1:]))


def test_single_symbol_corpus():
    """
    A corpus of one repeated symbol drives its emission to 1 minus the floor.
    """
    hmm = init_left_right(1, 2, rng_seed=0)
    trained, report = baum_welch(hmm, [[1, 1, 1, 1]] * 5)
    assert trained.emission[0, 0] >= 0.999
    assert trained.emission[0, 1] == pytest.approx(defs.EMISSION_FLOOR)
    assert report.converged
    assert_monotone(report.log_likelihood_history)


def test_history_monotone_and_structure_kept():
    """
    Likelihood never decreases, the model stays valid and structural zeros stay zero.
    """
    rng = np.random.default_rng(11)
    for seed in range(5):
        hmm = init_left_right(4, 9, rng_seed=seed)
        sequences = [rng.integers(1, 10, size=rng.integers(5, 15)) for _ in range(30)]
        trained, report = baum_welch(hmm, sequences, max_iterations=100)
        assert_monotone(report.log_likelihood_history)
        assert validate_hmm(trained) == []
        assert np.all(trained.transition[~left_right_mask(4)] == 0.0)
        assert trained.initial.tolist() == [1.0, 0.0, 0.0, 0.0]
        assert np.all(trained.emission >= defs.EMISSION_FLOOR - 1e-15)
        assert report.iterations_run <= 100


def test_iteration_cap():
    """
    max_iterations bounds the number of re-estimation steps.
    """
    rng = np.random.default_rng(3)
    hmm = init_left_right(3, 5, rng_seed=1)
    sequences = rng.integers(1, 6, size=(20, 10))
    _, report = baum_welch(hmm, sequences, max_iterations=2, tolerance=1e-300)
    assert report.iterations_run == 2
    assert not report.converged
    assert len(report.log_likelihood_history) == 3


def test_parameter_recovery():
    """
    Training on samples of a known left-right model recovers its parameters.
    """
    truth = DiscreteHmm([[0.7, 0.3], [0.0, 1.0]], [[0.9, 0.1], [0.15, 0.85]], [1.0, 0.0])
    sequences = sample_sequences(truth, count=1000, length=10, rng_seed=2026)
    trained, report = baum_welch(init_left_right(2, 2, rng_seed=9), sequences)
    assert_monotone(report.log_likelihood_history)
    assert np.allclose(trained.transition, truth.transition, atol=0.05)
    assert np.allclose(trained.emission, truth.emission, atol=0.05)


def test_bad_training_input():
    """
    Empty corpora and out-of-range symbols are rejected.
    """
    hmm = init_left_right(2, 3, rng_seed=0)
    with pytest.raises(InvalidArgumentError):
        baum_welch(hmm, [])
    with pytest.raises(InvalidArgumentError):
        baum_welch(hmm, [[1, 2, 4]])
    with pytest.raises(InvalidArgumentError):
        baum_welch(hmm, [[1, 2]], max_iterations=0)


def test_impossible_sequences_are_skipped():
    """
    Sequences the model cannot produce do not poison training; a corpus of
    nothing but impossible sequences is an error.
    """
    hmm = DiscreteHmm([[1.0]], [[0.5, 0.5, 0.0]], [1.0])
    trained, report = baum_welch(hmm, [[1, 2, 1], [1, 3]])
    assert validate_hmm(trained) == []
    assert report.log_likelihood_history[0] == pytest.approx(3 * np.log(0.5))
    with pytest.raises(InvalidArgumentError):
        baum_welch(hmm, [[3, 3]])


def test_floor_rows():
    """
    Rows become distributions with every entry at or above the floor.
    """
    rows = floor_rows(np.array([[10.0, 0.0, 0.0], [1.0, 1.0, 2.0]]), 0.01)
    assert np.allclose(rows.sum(axis=1), 1.0, atol=1e-15)
    assert rows[0].tolist() == pytest.approx([0.98, 0.01, 0.01])
    assert rows[1].tolist() == pytest.approx([0.25, 0.25, 0.5])
    with pytest.raises(InvalidArgumentError):
        floor_rows(np.ones((1, 4)), 0.25)
