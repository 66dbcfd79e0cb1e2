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

    Discrete left-right hidden Markov models: scaled forward scoring and
    multi-sequence Baum-Welch re-estimation.

    Symbols are 1-based at the API boundary and 0-based internally.

    2026-Oct-19  CHMM developers  Created this.
"""

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from chmm.errors import InvalidArgumentError
from chmm.logger import get_logger
from chmm import defs

logger = get_logger(__name__)

STOCHASTIC_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class DiscreteHmm:
    """
    A discrete HMM lambda = (A, B, pi) with N states and M symbols.
    Arrays are copied on construction and made read-only.
    """
    transition: np.ndarray
    emission: np.ndarray
    initial: np.ndarray

    def __post_init__(self):
        transition = np.array(self.transition, dtype=np.float64)
        emission = np.array(self.emission, dtype=np.float64)
        initial = np.array(self.initial, dtype=np.float64)
        if transition.ndim != 2 or transition.shape[0] != transition.shape[1] or transition.shape[0] < 1:
            raise InvalidArgumentError(f'Transition matrix must be N x N with N >= 1, got shape {transition.shape}')
        n = transition.shape[0]
        if emission.ndim != 2 or emission.shape[0] != n or emission.shape[1] < 1:
            raise InvalidArgumentError(f'Emission matrix must be {n} x M with M >= 1, got shape {emission.shape}')
        if initial.shape != (n,):
            raise InvalidArgumentError(f'Initial vector must have {n} entries, got shape {initial.shape}')
        for arr in (transition, emission, initial):
            arr.setflags(write=False)
        object.__setattr__(self, 'transition', transition)
        object.__setattr__(self, 'emission', emission)
        object.__setattr__(self, 'initial', initial)
        # Row k holds B[:, k], the per-state probabilities of symbol k
        emission_t = np.ascontiguousarray(emission.T)
        emission_t.setflags(write=False)
        object.__setattr__(self, '_emission_t', emission_t)

    @property
    def n_states(self) -> int:
        return int(self.transition.shape[0])

    @property
    def n_symbols(self) -> int:
        return int(self.emission.shape[1])

    def to_dict(self) -> Dict:
        return {
            'n_states': self.n_states,
            'n_symbols': self.n_symbols,
            'transition': self.transition.tolist(),
            'emission': self.emission.tolist(),
            'initial': self.initial.tolist(),
        }

    @classmethod
    def from_dict(cls, d: Dict) -> 'DiscreteHmm':
        hmm = cls(d['transition'], d['emission'], d['initial'])
        if 'n_states' in d and d['n_states'] != hmm.n_states:
            raise InvalidArgumentError(f'n_states is {d["n_states"]} but transition has {hmm.n_states} rows')
        if 'n_symbols' in d and d['n_symbols'] != hmm.n_symbols:
            raise InvalidArgumentError(f'n_symbols is {d["n_symbols"]} but emission has {hmm.n_symbols} columns')
        return hmm

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiscreteHmm):
            return NotImplemented
        return (np.array_equal(self.transition, other.transition)
                and np.array_equal(self.emission, other.emission)
                and np.array_equal(self.initial, other.initial))

    def __repr__(self) -> str:
        return f'DiscreteHmm(n_states={self.n_states}, n_symbols={self.n_symbols})'


@dataclass(frozen=True)
class TrainingReport:
    log_likelihood_history: Tuple[float, ...]
    iterations_run: int
    converged: bool


def left_right_mask(n_states: int) -> np.ndarray:
    """
    True where a left-right transition is allowed: self-loops and the next state.
    """
    idx = np.arange(n_states)
    return (idx[None, :] == idx[:, None]) | (idx[None, :] == idx[:, None] + 1)


def init_left_right(n_states: int, n_symbols: int, rng_seed: int) -> DiscreteHmm:
    """
    A random left-right HMM that starts in its first state.
    """
    if n_states < 1 or n_symbols < 1:
        raise InvalidArgumentError(f'n_states and n_symbols must be >= 1, got {n_states} and {n_symbols}')
    rng = np.random.default_rng(rng_seed)
    mask = left_right_mask(n_states)
    transition = np.where(mask, rng.uniform(0.05, 1.0, size=(n_states, n_states)), 0.0)
    transition /= transition.sum(axis=1, keepdims=True)
    emission = rng.uniform(0.05, 1.0, size=(n_states, n_symbols))
    emission /= emission.sum(axis=1, keepdims=True)
    initial = np.zeros(n_states)
    initial[0] = 1.0
    return DiscreteHmm(transition, emission, initial)


def validate_hmm(hmm: DiscreteHmm) -> List[str]:
    """
    Every violated invariant of @hmm, located by 1-based row and column.
    An empty list means the model is valid.
    """
    violations = []

    def check_probabilities(name: str, arr: np.ndarray) -> None:
        if not np.all(np.isfinite(arr)):
            for loc in zip(*np.nonzero(~np.isfinite(arr))):
                violations.append(f'{name}{_loc(loc)} is not finite')
            return
        for loc in zip(*np.nonzero((arr < 0.0) | (arr > 1.0))):
            violations.append(f'{name}{_loc(loc)} = {float(arr[loc])!r} is outside [0, 1]')

    check_probabilities('transition', hmm.transition)
    check_probabilities('emission', hmm.emission)
    check_probabilities('initial', hmm.initial)

    for name, matrix in (('transition', hmm.transition), ('emission', hmm.emission)):
        for i, total in enumerate(matrix.sum(axis=1)):
            if not abs(total - 1.0) <= STOCHASTIC_TOLERANCE:
                violations.append(f'{name} row {i + 1} sums to {float(total)!r}')
    total = hmm.initial.sum()
    if not abs(total - 1.0) <= STOCHASTIC_TOLERANCE:
        violations.append(f'initial sums to {float(total)!r}')

    mask = left_right_mask(hmm.n_states)
    for i, j in zip(*np.nonzero(~mask & (hmm.transition != 0.0))):
        violations.append(f'transition[{i + 1}][{j + 1}] = {float(hmm.transition[i, j])!r} breaks the left-right structure')

    return violations


def _loc(index: Tuple) -> str:
    return ''.join(f'[{int(i) + 1}]' for i in index)


def _as_observations(hmm: DiscreteHmm, observations: Iterable[int]) -> np.ndarray:
    """
    Validate 1-based @observations and return them 0-based.
    """
    obs = np.asarray(observations if isinstance(observations, np.ndarray) else list(observations))
    if obs.size == 0:
        raise InvalidArgumentError('Observation sequence is empty')
    if obs.dtype.kind not in 'iu':
        if obs.dtype.kind != 'f' or not np.all(np.isfinite(obs)) or not np.all(obs == np.round(obs)):
            raise InvalidArgumentError('Observations must be integer symbols')
    obs = obs.astype(np.int64)
    if obs.min() < 1 or obs.max() > hmm.n_symbols:
        bad = obs[(obs < 1) | (obs > hmm.n_symbols)][0]
        raise InvalidArgumentError(f'Symbol {bad} outside [1, {hmm.n_symbols}]')
    return obs - 1


def forward_log_likelihood(hmm: DiscreteHmm, observations: Sequence[int]) -> float:
    """
    ln P(observations | hmm) by the scaled forward procedure.
    Returns -inf for an impossible sequence.
    """
    obs = _as_observations(hmm, observations)
    transition = hmm.transition
    emission_t = hmm._emission_t

    alpha = hmm.initial * emission_t[obs[0]]
    scale = alpha.sum()
    if scale <= 0.0:
        return -math.inf
    log_likelihood = math.log(scale)
    alpha = alpha / scale
    for o in obs[1:]:
        alpha = (alpha @ transition) * emission_t[o]
        scale = alpha.sum()
        if scale <= 0.0:
            return -math.inf
        log_likelihood += math.log(scale)
        alpha = alpha / scale
    return log_likelihood


def forward_log_likelihood_batch(hmm: DiscreteHmm, observations: np.ndarray) -> np.ndarray:
    """
    Score a stack of equal-length sequences (S x T, 1-based symbols) at once.
    """
    obs = np.asarray(observations)
    if obs.ndim != 2:
        raise InvalidArgumentError(f'Expected an S x T array of sequences, got shape {obs.shape}')
    if obs.shape[0] == 0:
        return np.zeros(0)
    obs = _as_observations(hmm, obs.ravel()).reshape(obs.shape)
    _, _, scales, valid = _forward(hmm.transition, hmm._emission_t, hmm.initial, obs)
    result = np.full(obs.shape[0], -np.inf)
    result[valid] = np.log(scales[valid]).sum(axis=1)
    return result


def _forward(transition: np.ndarray, emission_t: np.ndarray, initial: np.ndarray,
        obs: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Scaled forward pass over an S x T block of 0-based observations.
    Returns (alpha_hat, emission probabilities per step, scales, valid mask).
    """
    n_seq, length = obs.shape
    probs = emission_t[obs]
    alpha = np.empty((n_seq, length, transition.shape[0]))
    scales = np.ones((n_seq, length))
    valid = np.ones(n_seq, dtype=bool)

    a = initial[None, :] * probs[:, 0]
    for t in range(length):
        if t:
            a = (alpha[:, t - 1] @ transition) * probs[:, t]
        c = a.sum(axis=1)
        dead = c <= 0.0
        if dead.any():
            valid &= ~dead
            c = np.where(dead, 1.0, c)
        alpha[:, t] = a / c[:, None]
        scales[:, t] = c
    return alpha, probs, scales, valid


def _backward(transition: np.ndarray, probs: np.ndarray, scales: np.ndarray) -> np.ndarray:
    n_seq, length, n_states = probs.shape
    beta = np.empty((n_seq, length, n_states))
    beta[:, -1] = 1.0
    for t in range(length - 2, -1, -1):
        beta[:, t] = ((probs[:, t + 1] * beta[:, t + 1]) @ transition.T) / scales[:, t + 1, None]
    return beta


def floor_rows(counts: np.ndarray, floor: float) -> np.ndarray:
    """
    Normalize each row of @counts into a distribution whose entries are all >= @floor.

    Entries that would fall below the floor are pinned to it and the remaining
    mass is shared in proportion to the counts. This is the maximizer of the
    expected log-likelihood under the floor constraint.
    """
    counts = np.asarray(counts, dtype=np.float64)
    n_cols = counts.shape[1]
    if floor * n_cols >= 1.0:
        raise InvalidArgumentError(f'Floor {floor} is too large for {n_cols} symbols')
    out = np.empty_like(counts)
    for i, row in enumerate(counts):
        p = row / row.sum()
        clamped = np.zeros(n_cols, dtype=bool)
        while True:
            low = ~clamped & (p < floor)
            if not low.any():
                break
            clamped |= low
            free = ~clamped
            mass = 1.0 - floor * clamped.sum()
            p = np.where(clamped, floor, row * (mass / row[free].sum()))
        out[i] = p
    return out


def _group_by_length(hmm: DiscreteHmm, training_sequences: Iterable[Sequence[int]]) -> List[np.ndarray]:
    groups = defaultdict(list)
    for seq in training_sequences:
        obs = _as_observations(hmm, seq)
        groups[len(obs)].append(obs)
    return [np.stack(groups[length]) for length in sorted(groups)]


def _expected_counts(hmm: DiscreteHmm, blocks: List[np.ndarray]) -> Tuple[float, np.ndarray, np.ndarray, int]:
    """
    E-step over every sequence. Returns (total log-likelihood,
    expected transition counts, expected emission counts, impossible sequences).
    """
    n_states, n_symbols = hmm.n_states, hmm.n_symbols
    xi_sum = np.zeros((n_states, n_states))
    emission_counts = np.zeros((n_states, n_symbols))
    log_likelihood = 0.0
    impossible = 0

    for obs in blocks:
        alpha, probs, scales, valid = _forward(hmm.transition, hmm._emission_t, hmm.initial, obs)
        if not valid.all():
            impossible += int((~valid).sum())
            obs, alpha, probs, scales = obs[valid], alpha[valid], probs[valid], scales[valid]
            if obs.shape[0] == 0:
                continue
        beta = _backward(hmm.transition, probs, scales)
        log_likelihood += float(np.log(scales).sum())

        gamma = alpha * beta
        if obs.shape[1] > 1:
            weighted = probs[:, 1:] * beta[:, 1:] / scales[:, 1:, None]
            xi_sum += np.einsum('sti,stj->ij', alpha[:, :-1], weighted) * hmm.transition

        flat_obs = obs.ravel()
        flat_gamma = gamma.reshape(-1, n_states)
        for i in range(n_states):
            emission_counts[i] += np.bincount(flat_obs, weights=flat_gamma[:, i], minlength=n_symbols)

    return log_likelihood, xi_sum, emission_counts, impossible


def _reestimate(hmm: DiscreteHmm, xi_sum: np.ndarray, emission_counts: np.ndarray,
        emission_floor: float) -> DiscreteHmm:
    transition = np.array(hmm.transition)
    for i, row in enumerate(xi_sum):
        total = row.sum()
        if total > 0.0:
            transition[i] = row / total
    # Structural zeros stay exactly zero
    transition[~left_right_mask(hmm.n_states)] = 0.0

    emission = np.array(hmm.emission)
    seen = emission_counts.sum(axis=1) > 0.0
    if seen.any():
        emission[seen] = floor_rows(emission_counts[seen], emission_floor)
    return DiscreteHmm(transition, emission, hmm.initial)


def baum_welch(hmm: DiscreteHmm, training_sequences: Iterable[Sequence[int]],
        max_iterations: int = defs.BW_MAX_ITERATIONS, tolerance: float = defs.BW_TOLERANCE,
        emission_floor: float = defs.EMISSION_FLOOR) -> Tuple[DiscreteHmm, TrainingReport]:
    """
    Re-estimate @hmm from every sequence in @training_sequences jointly.
    The initial distribution is held fixed.

    Stops once the total log-likelihood improves by less than @tolerance,
    or after @max_iterations re-estimation steps.
    """
    if max_iterations < 1:
        raise InvalidArgumentError(f'max_iterations must be >= 1, got {max_iterations}')
    if not tolerance > 0:
        raise InvalidArgumentError(f'tolerance must be positive, got {tolerance}')
    blocks = _group_by_length(hmm, training_sequences)
    if not blocks:
        raise InvalidArgumentError('No training sequences')

    history = []
    converged = False
    iterations = 0
    impossible = 0
    while True:
        log_likelihood, xi_sum, emission_counts, impossible = _expected_counts(hmm, blocks)
        if not history and impossible == sum(len(b) for b in blocks):
            raise InvalidArgumentError('Every training sequence is impossible under the initial model')
        history.append(log_likelihood)
        if len(history) > 1 and history[-1] - history[-2] < tolerance:
            converged = True
            break
        if iterations >= max_iterations:
            break
        hmm = _reestimate(hmm, xi_sum, emission_counts, emission_floor)
        iterations += 1
        logger.debug(f'Baum-Welch iteration {iterations}: log-likelihood {log_likelihood:.6f}')

    if impossible:
        logger.warning(f'{impossible} training sequences are impossible under the trained model')
    logger.debug(f'Baum-Welch finished after {iterations} iterations '
            f'(converged={converged}, log-likelihood {history[-1]:.6f})')
    return hmm, TrainingReport(tuple(history), iterations, converged)


def sample_sequences(hmm: DiscreteHmm, count: int, length: int, rng_seed: int) -> np.ndarray:
    """
    Draw @count sequences of @length 1-based symbols from @hmm.
    """
    if count < 1 or length < 1:
        raise InvalidArgumentError(f'count and length must be >= 1, got {count} and {length}')
    rng = np.random.default_rng(rng_seed)
    cum_initial = np.cumsum(hmm.initial)
    cum_transition = np.cumsum(hmm.transition, axis=1)
    cum_emission = np.cumsum(hmm.emission, axis=1)
    last_state, last_symbol = hmm.n_states - 1, hmm.n_symbols - 1

    def draw(cumulative: np.ndarray, limit: int) -> np.ndarray:
        u = rng.random(count)
        return np.minimum((cumulative < u[:, None]).sum(axis=1), limit)

    out = np.empty((count, length), dtype=np.int64)
    states = draw(np.broadcast_to(cum_initial, (count, hmm.n_states)), last_state)
    for t in range(length):
        if t:
            states = draw(cum_transition[states], last_state)
        out[:, t] = draw(cum_emission[states], last_symbol)
    return out + 1
