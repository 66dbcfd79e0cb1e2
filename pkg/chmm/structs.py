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

    Gesture labels and the angular velocity data model shared by every layer.

    2026-Oct-19  CHMM developers  Created this.
"""

import math
from dataclasses import dataclass
from enum import Enum, IntEnum, unique, auto
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from chmm.errors import InvalidArgumentError, ValidationError
from chmm import defs


@unique
class GestureLabel(IntEnum):
    """
    The nine head gestures. Labels 1-7 are simple, 8 and 9 are complex.
    """
    BEING_IDLE = 1
    ROTATING_LEFT = auto()
    ROTATING_RIGHT = auto()
    TILTING_UPWARD = auto()
    TILTING_DOWNWARD = auto()
    LEANING_LEFT = auto()
    LEANING_RIGHT = auto()
    SHAKING = auto()
    NODDING = auto()

    @property
    def display_name(self) -> str:
        return ''.join(part.capitalize() for part in self.name.split('_'))

    @property
    def abbreviation(self) -> str:
        return _ABBREVIATIONS[self]

    @property
    def is_simple(self) -> bool:
        return self <= GestureLabel.LEANING_RIGHT

    @property
    def is_complex(self) -> bool:
        return not self.is_simple

    @classmethod
    def simple(cls) -> Tuple['GestureLabel', ...]:
        return tuple(l for l in cls if l.is_simple)

    @classmethod
    def complex(cls) -> Tuple['GestureLabel', ...]:
        return (cls.SHAKING, cls.NODDING)

    @classmethod
    def parse(cls, text: str) -> 'GestureLabel':
        """
        Parse a label from its number, display name, enum name or abbreviation.
        """
        token = str(text).strip()
        try:
            return cls(int(token))
        except ValueError:
            pass
        folded = token.replace('_', '').replace('-', '').lower()
        for label in cls:
            if folded in (label.display_name.lower(), label.abbreviation.lower()):
                return label
        if folded == 'neutral':
            return cls.BEING_IDLE
        raise InvalidArgumentError(f'Unknown gesture label {text!r}')


_ABBREVIATIONS = {
    GestureLabel.BEING_IDLE: 'I',
    GestureLabel.ROTATING_LEFT: 'RL',
    GestureLabel.ROTATING_RIGHT: 'RR',
    GestureLabel.TILTING_UPWARD: 'TU',
    GestureLabel.TILTING_DOWNWARD: 'TD',
    GestureLabel.LEANING_LEFT: 'LL',
    GestureLabel.LEANING_RIGHT: 'LR',
    GestureLabel.SHAKING: 'S',
    GestureLabel.NODDING: 'N',
}

# Simple labels that are buffered as meta-symbols for the complex layer
QUEUED_LABELS = frozenset({
    GestureLabel.BEING_IDLE,
    GestureLabel.ROTATING_LEFT,
    GestureLabel.ROTATING_RIGHT,
    GestureLabel.TILTING_UPWARD,
    GestureLabel.TILTING_DOWNWARD,
})


# Class label for a complex window that passes neither threshold
REJECTED = -1


class EventKind(Enum):
    SIMPLE = 'simple'
    COMPLEX = 'complex'


@dataclass(frozen=True)
class AngularVelocitySample:
    """
    One (yaw, pitch, roll) angular velocity reading in rad/s at a frame index.
    """
    frame: int
    omega: Tuple[float, float, float]

    def __post_init__(self):
        if self.frame < 0:
            raise InvalidArgumentError(f'Negative frame index {self.frame}')
        if len(self.omega) != 3:
            raise InvalidArgumentError(f'Angular velocity must have 3 components, got {len(self.omega)}')
        if not all(math.isfinite(c) for c in self.omega):
            raise InvalidArgumentError(f'Non-finite angular velocity at frame {self.frame}')


class MotionSequence:
    """
    An ordered run of angular velocity samples at a fixed rate.
    Backed by read-only numpy arrays: frames (n,) and omega (n, 3).
    """
    def __init__(self, frames: Iterable[int], omega: Iterable[Sequence[float]],
            sample_rate_hz: float = defs.SAMPLE_RATE_HZ):
        frames = np.array(frames if isinstance(frames, np.ndarray) else list(frames), dtype=np.int64)
        omega = np.array(omega, dtype=np.float64)
        if omega.size == 0:
            omega = omega.reshape(0, 3)
        if frames.ndim != 1 or omega.ndim != 2 or omega.shape[1] != 3 or omega.shape[0] != frames.shape[0]:
            raise InvalidArgumentError(f'Expected n frames and n x 3 velocities, got {frames.shape} and {omega.shape}')
        if not (sample_rate_hz > 0 and math.isfinite(sample_rate_hz)):
            raise InvalidArgumentError(f'Sample rate must be positive, got {sample_rate_hz}')
        if frames.size and frames[0] < 0:
            raise InvalidArgumentError('Frame indices must be nonnegative')
        if frames.size > 1 and np.any(np.diff(frames) <= 0):
            raise InvalidArgumentError('Frame indices must be strictly increasing')
        if not np.all(np.isfinite(omega)):
            raise InvalidArgumentError('Angular velocities must be finite')
        frames.setflags(write=False)
        omega.setflags(write=False)
        self.frames = frames
        self.omega = omega
        self.sample_rate_hz = float(sample_rate_hz)

    @classmethod
    def from_samples(cls, samples: Iterable[AngularVelocitySample],
            sample_rate_hz: float = defs.SAMPLE_RATE_HZ) -> 'MotionSequence':
        samples = list(samples)
        return cls([s.frame for s in samples], [s.omega for s in samples], sample_rate_hz)

    @classmethod
    def from_array(cls, omega: np.ndarray, sample_rate_hz: float = defs.SAMPLE_RATE_HZ,
            first_frame: int = 0) -> 'MotionSequence':
        """
        Build a sequence numbered first_frame, first_frame + 1, ...
        """
        omega = np.asarray(omega, dtype=np.float64).reshape(-1, 3)
        return cls(np.arange(first_frame, first_frame + len(omega), dtype=np.int64), omega, sample_rate_hz)

    @classmethod
    def concatenate(cls, parts: Sequence['MotionSequence'],
            sample_rate_hz: Optional[float] = None) -> 'MotionSequence':
        """
        Join @parts back to back, renumbering frames from 0.
        """
        if sample_rate_hz is None:
            sample_rate_hz = parts[0].sample_rate_hz if parts else defs.SAMPLE_RATE_HZ
        omega = np.concatenate([p.omega for p in parts]) if parts else np.zeros((0, 3))
        return cls.from_array(omega, sample_rate_hz)

    @property
    def samples(self) -> List[AngularVelocitySample]:
        return list(self)

    @property
    def duration(self) -> float:
        return len(self) / self.sample_rate_hz

    def norms(self) -> np.ndarray:
        return np.sqrt(np.sum(self.omega * self.omega, axis=1))

    def slice(self, start: int, stop: int) -> 'MotionSequence':
        """
        Samples with positional index in [start, stop). Frame numbers are kept.
        """
        return MotionSequence(self.frames[start:stop], self.omega[start:stop], self.sample_rate_hz)

    def __len__(self) -> int:
        return int(self.frames.shape[0])

    def __iter__(self) -> Iterator[AngularVelocitySample]:
        for frame, omega in zip(self.frames.tolist(), self.omega.tolist()):
            yield AngularVelocitySample(frame, tuple(omega))

    def __eq__(self, other) -> bool:
        if not isinstance(other, MotionSequence):
            return NotImplemented
        return (self.sample_rate_hz == other.sample_rate_hz
                and np.array_equal(self.frames, other.frames)
                and np.array_equal(self.omega, other.omega))

    def __repr__(self) -> str:
        return f'MotionSequence(samples={len(self)}, sample_rate_hz={self.sample_rate_hz})'


@dataclass(frozen=True)
class LabeledGesture:
    label: GestureLabel
    motion: MotionSequence
    gesture_id: str = ''

    def __post_init__(self):
        object.__setattr__(self, 'label', GestureLabel(self.label))
        duration = len(self.motion) / self.motion.sample_rate_hz
        if duration > defs.MAX_GESTURE_DURATION + 1e-9:
            raise ValidationError(f'Invalid gesture {self.gesture_id!r}',
                    [f'{duration:.3f} s exceeds {defs.MAX_GESTURE_DURATION} s'])


@dataclass(frozen=True)
class Dataset:
    items: Tuple[LabeledGesture, ...] = ()
    provenance: str = ''

    def __post_init__(self):
        object.__setattr__(self, 'items', tuple(self.items))

    def by_label(self) -> Dict[GestureLabel, List[LabeledGesture]]:
        grouped = {label: [] for label in GestureLabel}
        for item in self.items:
            grouped[item.label].append(item)
        return grouped

    @property
    def sample_rate_hz(self) -> float:
        if not self.items:
            return defs.SAMPLE_RATE_HZ
        return self.items[0].motion.sample_rate_hz

    def __len__(self) -> int:
        return len(self.items)


@dataclass(frozen=True)
class ScriptSegment:
    """
    One step of a scripted stream: samples with positional index in [start, stop).
    """
    label: GestureLabel
    start: int
    stop: int

    def __post_init__(self):
        object.__setattr__(self, 'label', GestureLabel(self.label))
        if not 0 <= self.start <= self.stop:
            raise InvalidArgumentError(f'Invalid segment bounds [{self.start}, {self.stop})')
