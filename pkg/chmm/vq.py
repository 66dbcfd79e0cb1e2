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

    K-Means codebooks and minimum-distance vector quantization of
    angular velocity vectors into 1-based observation symbols.

    2026-Oct-19  CHMM developers  Created this.
"""

from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np

from chmm.errors import InvalidArgumentError, ValidationError
from chmm.logger import get_logger
from chmm.utils import derive_seed
from chmm import defs

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class Codebook:
    """
    K cluster centers in rad/s. Symbol j (1-based) denotes centers[j - 1].
    """
    centers: np.ndarray
    inertia: float = 0.0
    inertia_history: Tuple[float, ...] = ()

    def __post_init__(self):
        centers = np.array(self.centers, dtype=np.float64)
        violations = []
        if centers.ndim != 2 or centers.shape[1] != 3:
            violations.append(f'centers must be K x 3, got shape {centers.shape}')
        elif centers.shape[0] < 1:
            violations.append('codebook needs at least one center')
        elif not np.all(np.isfinite(centers)):
            violations.append('centers must be finite')
        if not (np.isfinite(self.inertia) and self.inertia >= 0):
            violations.append(f'inertia must be finite and nonnegative, got {self.inertia!r}')
        if violations:
            raise ValidationError('Invalid codebook', violations)
        centers.setflags(write=False)
        object.__setattr__(self, 'centers', centers)
        object.__setattr__(self, 'inertia', float(self.inertia))
        object.__setattr__(self, 'inertia_history', tuple(float(x) for x in self.inertia_history))

    @property
    def k(self) -> int:
        return int(self.centers.shape[0])

    def to_dict(self) -> Dict:
        return {
            'k': self.k,
            'centers': self.centers.tolist(),
            'inertia': self.inertia,
        }

    @classmethod
    def from_dict(cls, d: Dict) -> 'Codebook':
        codebook = cls(d['centers'], d.get('inertia', 0.0))
        if 'k' in d and d['k'] != codebook.k:
            raise ValidationError('Invalid codebook', [f'k is {d["k"]} but there are {codebook.k} centers'])
        return codebook

    def __eq__(self, other) -> bool:
        if not isinstance(other, Codebook):
            return NotImplemented
        return np.array_equal(self.centers, other.centers) and self.inertia == other.inertia

    def __repr__(self) -> str:
        return f'Codebook(k={self.k}, inertia={self.inertia:.6g})'


def _as_vectors(vectors) -> np.ndarray:
    data = np.asarray(vectors, dtype=np.float64)
    if data.ndim == 1 and data.size == 3:
        data = data.reshape(1, 3)
    if data.ndim != 2 or data.shape[1] != 3:
        raise InvalidArgumentError(f'Expected 3-D vectors, got shape {data.shape}')
    if not np.all(np.isfinite(data)):
        raise InvalidArgumentError('Vectors must be finite')
    return data


def _squared_distances(data: np.ndarray, centers: np.ndarray) -> np.ndarray:
    diff = data[:, None, :] - centers[None, :, :]
    return np.einsum('nkd,nkd->nk', diff, diff)


def _lloyd(data: np.ndarray, k: int, seed: int, max_iterations: int) -> Tuple[np.ndarray, float, Tuple[float, ...]]:
    """
    One K-Means run. Returns (centers, inertia, inertia after each assignment).
    """
    rng = np.random.default_rng(seed)
    centers = data[rng.choice(len(data), size=k, replace=False)].copy()
    dist = _squared_distances(data, centers)
    labels = np.argmin(dist, axis=1)
    point_cost = dist[np.arange(len(data)), labels]
    history = [float(point_cost.sum())]

    for _ in range(max_iterations):
        new_centers = centers.copy()
        counts = np.bincount(labels, minlength=k)
        for j in np.nonzero(counts)[0]:
            new_centers[j] = data[labels == j].mean(axis=0)
        # An empty cluster takes the point that is currently worst served
        cost = point_cost.copy()
        for j in np.nonzero(counts == 0)[0]:
            worst = int(np.argmax(cost))
            new_centers[j] = data[worst]
            cost[worst] = -1.0

        dist = _squared_distances(data, new_centers)
        new_labels = np.argmin(dist, axis=1)
        point_cost = dist[np.arange(len(data)), new_labels]
        history.append(float(point_cost.sum()))
        centers = new_centers
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels

    return centers, history[-1], tuple(history)


def kmeans_fit(vectors: Sequence[Sequence[float]], k: int, rng_seed: int,
        restarts: int = defs.KMEANS_RESTARTS,
        max_iterations: int = defs.KMEANS_MAX_ITERATIONS) -> Codebook:
    """
    Fit a K-center codebook to @vectors. Keeps the run with the lowest
    inertia over @restarts seeded initializations; ties go to the earliest run.
    """
    data = _as_vectors(vectors)
    if k < 1:
        raise InvalidArgumentError(f'k must be >= 1, got {k}')
    if restarts < 1 or max_iterations < 1:
        raise InvalidArgumentError('restarts and max_iterations must be >= 1')
    if len(data) < k:
        raise InvalidArgumentError(f'Need at least {k} vectors to fit {k} centers, got {len(data)}')

    best = None
    for restart in range(restarts):
        centers, inertia, history = _lloyd(data, k, derive_seed(rng_seed, restart), max_iterations)
        logger.debug(f'K-Means restart {restart}: k={k} inertia={inertia:.6g} after {len(history) - 1} iterations')
        if best is None or inertia < best[1]:
            best = (centers, inertia, history)

    return Codebook(best[0], best[1], best[2])


def quantize(codebook: Codebook, v: Sequence[float]) -> int:
    """
    The 1-based symbol of the nearest center to @v. Ties go to the lowest index.
    """
    data = np.asarray(v, dtype=np.float64)
    if data.shape != (3,):
        raise InvalidArgumentError(f'Expected a 3-D vector, got shape {data.shape}')
    if not np.all(np.isfinite(data)):
        raise InvalidArgumentError('Vector must be finite')
    return int(quantize_sequence(codebook, data[None, :])[0])


def quantize_sequence(codebook: Codebook, vectors) -> np.ndarray:
    """
    Quantize an n x 3 array of vectors at once.
    """
    data = np.asarray(vectors, dtype=np.float64)
    if data.size == 0:
        return np.zeros(0, dtype=np.int64)
    data = _as_vectors(data)
    return np.argmin(_squared_distances(data, codebook.centers), axis=1).astype(np.int64) + 1
