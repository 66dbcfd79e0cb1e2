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

    The per-frame cascade: quantize, buffer L_B symbols, classify the
    window with the simple layer, queue L_Q meta-symbols, score the queue
    with the complex layer and select the output label.

    2026-Oct-19  CHMM developers  Created this.
"""

import json
import math
from collections import deque
from dataclasses import dataclass
from typing import Deque, Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from chmm.errors import ArtifactIOError, InvalidArgumentError, UnsupportedVersionError, UsageError, ValidationError
from chmm.hmm import DiscreteHmm, validate_hmm
from chmm.logger import get_logger
from chmm.structs import AngularVelocitySample, EventKind, GestureLabel, QUEUED_LABELS
from chmm.training import (ComplexCalibration, SimpleLayer, SIMPLE_LABELS, classify_simple_window,
        complex_scores)
from chmm.vq import Codebook, quantize
from chmm import defs

logger = get_logger(__name__)


@dataclass(frozen=True)
class GestureEvent:
    label: GestureLabel
    trigger_frame: int
    kind: EventKind
    score: float

    def __post_init__(self):
        object.__setattr__(self, 'label', GestureLabel(self.label))
        object.__setattr__(self, 'kind', EventKind(self.kind))
        if (self.kind == EventKind.COMPLEX) != self.label.is_complex:
            raise ValidationError('Invalid gesture event',
                    [f'{self.label.display_name} cannot be a {self.kind.value} event'])

    def to_dict(self) -> Dict:
        return {
            'frame': self.trigger_frame,
            'label': int(self.label),
            'name': self.label.display_name,
            'kind': self.kind.value,
            'score': self.score,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(',', ':'))


@dataclass(frozen=True)
class CascadeModel:
    """
    Everything the runtime needs: codebook, the seven simple models, the
    calibrated complex layer and the runtime thresholds.
    """
    codebook: Codebook
    simple_models: SimpleLayer
    complex: ComplexCalibration
    idle_symbols: FrozenSet[int] = frozenset()
    runtime_tau_shake: float = defs.RUNTIME_TAU_SHAKE
    runtime_tau_nod: float = defs.RUNTIME_TAU_NOD
    buffer_len: int = defs.BUFFER_LEN
    queue_len: int = defs.QUEUE_LEN
    sample_rate_hz: float = defs.SAMPLE_RATE_HZ
    format_version: int = defs.MODEL_FORMAT_VERSION

    def __post_init__(self):
        object.__setattr__(self, 'simple_models', tuple(self.simple_models))
        object.__setattr__(self, 'idle_symbols', frozenset(int(s) for s in self.idle_symbols))

    def violations(self) -> List[str]:
        violations = []
        if self.format_version != defs.MODEL_FORMAT_VERSION:
            violations.append(f'format_version is {self.format_version}, expected {defs.MODEL_FORMAT_VERSION}')
        if self.buffer_len < 1:
            violations.append(f'buffer_len = {self.buffer_len} must be >= 1')
        if self.queue_len < 1:
            violations.append(f'queue_len = {self.queue_len} must be >= 1')
        if not (self.sample_rate_hz > 0 and math.isfinite(self.sample_rate_hz)):
            violations.append(f'sample_rate_hz = {self.sample_rate_hz!r} must be positive')
        for name in ('runtime_tau_shake', 'runtime_tau_nod'):
            tau = getattr(self, name)
            if not (math.isfinite(tau) and tau <= 0):
                violations.append(f'{name} = {tau!r} must be finite and <= 0')
        if len(self.simple_models) != len(SIMPLE_LABELS):
            violations.append(f'expected {len(SIMPLE_LABELS)} simple_models, got {len(self.simple_models)}')
        for i, hmm in enumerate(self.simple_models):
            violations.extend(f'simple_models[{i + 1}]: {v}' for v in validate_hmm(hmm))
            if hmm.n_symbols != self.codebook.k:
                violations.append(f'simple_models[{i + 1}] has {hmm.n_symbols} symbols but the codebook has {self.codebook.k}')
        violations.extend(f'complex.{v}' for v in self.complex.violations())
        bad = sorted(s for s in self.idle_symbols if not 1 <= s <= self.codebook.k)
        if bad:
            violations.append(f'idle_symbols {bad} outside [1, {self.codebook.k}]')
        return violations

    def validate(self) -> None:
        violations = self.violations()
        if violations:
            raise ValidationError('Invalid cascade model', violations)

    def to_dict(self) -> Dict:
        return {
            'format_version': self.format_version,
            'codebook': self.codebook.to_dict(),
            'simple_models': [hmm.to_dict() for hmm in self.simple_models],
            'complex': self.complex.to_dict(),
            'idle_symbols': sorted(self.idle_symbols),
            'runtime_tau_shake': self.runtime_tau_shake,
            'runtime_tau_nod': self.runtime_tau_nod,
            'buffer_len': self.buffer_len,
            'queue_len': self.queue_len,
            'sample_rate_hz': self.sample_rate_hz,
        }

    @classmethod
    def from_dict(cls, d: Dict) -> 'CascadeModel':
        """
        Build a model from its JSON form without checking its invariants.
        """
        if not isinstance(d, dict):
            raise ValidationError('Invalid cascade model', ['top level must be an object'])
        if d.get('format_version') != defs.MODEL_FORMAT_VERSION:
            raise UnsupportedVersionError(f'Model format version {d.get("format_version")!r} is not supported, '
                    f'expected {defs.MODEL_FORMAT_VERSION}')
        field_name = 'codebook'
        try:
            codebook = Codebook.from_dict(d['codebook'])
            simple = []
            for i, hmm in enumerate(d['simple_models']):
                field_name = f'simple_models[{i + 1}]'
                simple.append(DiscreteHmm.from_dict(hmm))
            field_name = 'complex'
            calib = ComplexCalibration.from_dict(d['complex'])
            field_name = 'thresholds'
            return cls(
                codebook=codebook,
                simple_models=tuple(simple),
                complex=calib,
                idle_symbols=frozenset(int(s) for s in d.get('idle_symbols', ())),
                runtime_tau_shake=float(d['runtime_tau_shake']),
                runtime_tau_nod=float(d['runtime_tau_nod']),
                buffer_len=int(d['buffer_len']),
                queue_len=int(d['queue_len']),
                sample_rate_hz=float(d['sample_rate_hz']),
                format_version=int(d['format_version']),
            )
        except KeyError as e:
            raise ValidationError('Invalid cascade model', [f'{field_name}: missing field {e.args[0]!r}']) from None
        except (TypeError, ValueError) as e:
            raise ValidationError('Invalid cascade model', [f'{field_name}: {e}']) from None


def output_select(p_s: Sequence[float], p_c: Optional[Sequence[float]], tau_shake: float,
        tau_nod: float) -> GestureLabel:
    """
    Complex label if a fresh complex score clears its threshold, otherwise
    the best simple label. Ties go to the lowest label.
    """
    if len(p_s) != len(SIMPLE_LABELS):
        raise InvalidArgumentError(f'Expected {len(SIMPLE_LABELS)} simple scores, got {len(p_s)}')
    if p_c is not None:
        if len(p_c) != 2:
            raise InvalidArgumentError(f'Expected 2 complex scores, got {len(p_c)}')
        if p_c[0] > tau_shake or p_c[1] > tau_nod:
            return GestureLabel.SHAKING if p_c[0] >= p_c[1] else GestureLabel.NODDING
    return GestureLabel(int(np.argmax(np.asarray(p_s, dtype=np.float64))) + 1)


class CascadeState:
    """
    Streaming state for one sample stream. Not thread safe; one state per stream.
    """
    def __init__(self, model: Optional[CascadeModel] = None):
        self.model = model
        self.reset()

    def reset(self) -> None:
        self.symbol_buffer: List[int] = []
        self.meta_queue: Deque[int] = deque(maxlen=self.model.queue_len if self.model else None)
        self.last_simple_scores: Optional[np.ndarray] = None
        # (P_c, boundary index it was computed at)
        self.last_complex_scores: Optional[Tuple[np.ndarray, int]] = None
        self.frames_seen = 0
        self.boundaries = 0

    def step(self, sample: AngularVelocitySample) -> Optional[GestureEvent]:
        """
        Feed one sample. Returns an event at every window boundary.
        """
        model = self.model
        if model is None:
            raise UsageError('Cascade state has not been initialized with a model')

        self.symbol_buffer.append(quantize(model.codebook, sample.omega))
        self.frames_seen += 1
        if len(self.symbol_buffer) < model.buffer_len:
            return None

        window = self.symbol_buffer
        self.symbol_buffer = []
        self.boundaries += 1
        simple_label, p_s = classify_simple_window(model.simple_models, window, model.buffer_len)
        self.last_simple_scores = p_s

        p_c = None
        if simple_label in QUEUED_LABELS:
            self.meta_queue.append(int(simple_label))
            if len(self.meta_queue) == model.queue_len:
                p_c = complex_scores(model.complex, list(self.meta_queue), model.queue_len)
                self.last_complex_scores = (p_c, self.boundaries)

        label = output_select(p_s, p_c, model.runtime_tau_shake, model.runtime_tau_nod)
        if label.is_complex:
            self.meta_queue.clear()
            score = float(p_c[label - GestureLabel.SHAKING])
            logger.gesture(f'{label.display_name} at frame {sample.frame} (score {score:.4f})')
            return GestureEvent(label, sample.frame, EventKind.COMPLEX, score)
        return GestureEvent(label, sample.frame, EventKind.SIMPLE, float(p_s[label - 1]))

    def run(self, samples) -> List[GestureEvent]:
        events = []
        for sample in samples:
            event = self.step(sample)
            if event is not None:
                events.append(event)
        return events


def cascade_init(model: CascadeModel) -> CascadeState:
    model.validate()
    return CascadeState(model)


def cascade_step(state: CascadeState, sample: AngularVelocitySample) -> Optional[GestureEvent]:
    return state.step(sample)


def format_model(model: CascadeModel) -> str:
    return json.dumps(model.to_dict(), sort_keys=True, indent=2) + '\n'


def save_model(model: CascadeModel, path: str) -> None:
    model.validate()
    text = format_model(model)
    try:
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
    except OSError as e:
        raise ArtifactIOError(path, e.strerror or str(e)) from e
    logger.debug(f'Saved model to {path}')


def load_model(path: str) -> CascadeModel:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            text = f.read()
    except OSError as e:
        raise ArtifactIOError(path, e.strerror or str(e)) from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(f'{path}: not a model file', [f'line {e.lineno}: {e.msg}']) from None
    if isinstance(data, dict) and 'format_version' not in data:
        raise ValidationError(f'{path}: not a model file', ['missing field format_version'])
    model = CascadeModel.from_dict(data)
    model.validate()
    logger.debug(f'Loaded model from {path}')
    return model
