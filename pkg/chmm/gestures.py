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

    Synthetic "robotic head" gestures: programmable half-sine velocity
    pulses standing in for recorded human head motion.

    Axis convention: yaw > 0 rotates left, pitch > 0 tilts upward,
    roll > 0 leans left.

    2026-Oct-19  CHMM developers  Created this.
"""

import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from chmm.errors import InvalidArgumentError
from chmm.structs import GestureLabel, LabeledGesture, MotionSequence, Dataset, ScriptSegment
from chmm.utils import derive_seed, make_rng
from chmm import defs

YAW, PITCH, ROLL = 0, 1, 2

# (axis, sign of the first pulse)
GESTURE_AXES = {
    GestureLabel.ROTATING_LEFT: (YAW, 1.0),
    GestureLabel.ROTATING_RIGHT: (YAW, -1.0),
    GestureLabel.TILTING_UPWARD: (PITCH, 1.0),
    GestureLabel.TILTING_DOWNWARD: (PITCH, -1.0),
    GestureLabel.LEANING_LEFT: (ROLL, 1.0),
    GestureLabel.LEANING_RIGHT: (ROLL, -1.0),
    GestureLabel.SHAKING: (YAW, 1.0),
    GestureLabel.NODDING: (PITCH, -1.0),
}

DEFAULT_SCRIPT = (
    GestureLabel.ROTATING_LEFT, GestureLabel.BEING_IDLE,
    GestureLabel.ROTATING_RIGHT, GestureLabel.BEING_IDLE,
    GestureLabel.TILTING_UPWARD, GestureLabel.BEING_IDLE,
    GestureLabel.TILTING_DOWNWARD, GestureLabel.BEING_IDLE,
    GestureLabel.LEANING_LEFT, GestureLabel.BEING_IDLE,
    GestureLabel.LEANING_RIGHT, GestureLabel.BEING_IDLE,
    GestureLabel.NODDING, GestureLabel.BEING_IDLE,
    GestureLabel.SHAKING, GestureLabel.BEING_IDLE,
)


def sample_count(duration: float, sample_rate_hz: float = defs.SAMPLE_RATE_HZ) -> int:
    """
    Number of samples in @duration seconds, floor(f_s * T).
    """
    return int(math.floor(sample_rate_hz * duration + 1e-9))


def pulse_train(n: int, peak_velocity: float, pulses: int, first_sign: float) -> np.ndarray:
    """
    @pulses back-to-back half-sine lobes of alternating sign over @n samples,
    sampled at the middle of each frame.
    """
    phase = (np.arange(n) + 0.5) / n
    return first_sign * peak_velocity * np.sin(math.pi * pulses * phase)


def _noise(rng: np.random.Generator, n: int, noise_sigma: float) -> np.ndarray:
    if noise_sigma == 0:
        return np.zeros((n, 3))
    return rng.normal(0.0, noise_sigma, size=(n, 3))


def _check_gesture_args(peak_velocity: float, duration: float, noise_sigma: float, pulses: int) -> None:
    if not 0 < duration <= defs.MAX_GESTURE_DURATION:
        raise InvalidArgumentError(f'Duration must be in (0, {defs.MAX_GESTURE_DURATION}] s, got {duration}')
    if not 0 < peak_velocity <= defs.MAX_PEAK_VELOCITY:
        raise InvalidArgumentError(f'Peak velocity must be in (0, {defs.MAX_PEAK_VELOCITY}] rad/s, got {peak_velocity}')
    if not noise_sigma >= 0 or not math.isfinite(noise_sigma):
        raise InvalidArgumentError(f'Noise sigma must be nonnegative, got {noise_sigma}')
    if pulses not in (2, 3):
        raise InvalidArgumentError(f'Complex gestures have 2 or 3 pulses, got {pulses}')


def gesture_velocities(label: GestureLabel, peak_velocity: float, duration: float, noise_sigma: float,
        rng: np.random.Generator, pulses: int = defs.COMPLEX_PULSES,
        sample_rate_hz: float = defs.SAMPLE_RATE_HZ) -> np.ndarray:
    label = GestureLabel(label)
    _check_gesture_args(peak_velocity, duration, noise_sigma, pulses)
    n = sample_count(duration, sample_rate_hz)
    if n < 1:
        raise InvalidArgumentError(f'Duration {duration} s holds no samples at {sample_rate_hz} Hz')
    omega = np.zeros((n, 3))
    if label != GestureLabel.BEING_IDLE:
        axis, sign = GESTURE_AXES[label]
        omega[:, axis] = pulse_train(n, peak_velocity, pulses if label.is_complex else 1, sign)
    return omega + _noise(rng, n, noise_sigma)


def generate_gesture(label: GestureLabel, peak_velocity: float, duration: float, noise_sigma: float,
        rng_seed: int, pulses: int = defs.COMPLEX_PULSES,
        sample_rate_hz: float = defs.SAMPLE_RATE_HZ) -> LabeledGesture:
    """
    One synthetic gesture. Idle is pure noise; directional gestures are a
    single half-sine pulse on their axis; Shaking and Nodding alternate
    @pulses lobes on the yaw and pitch axes respectively.
    """
    rng = np.random.default_rng(rng_seed)
    omega = gesture_velocities(label, peak_velocity, duration, noise_sigma, rng, pulses, sample_rate_hz)
    return LabeledGesture(label, MotionSequence.from_array(omega, sample_rate_hz))


def _check_range(velocity_range: Tuple[float, float]) -> Tuple[float, float]:
    lo, hi = (float(v) for v in velocity_range)
    if not 0 < lo <= hi <= defs.MAX_PEAK_VELOCITY:
        raise InvalidArgumentError(f'Invalid velocity range [{lo}, {hi}]')
    return lo, hi


def generate_dataset(participants: int = defs.PARTICIPANTS, repetitions: int = defs.REPETITIONS,
        velocity_range: Tuple[float, float] = defs.VELOCITY_RANGE, noise_sigma: float = defs.NOISE_SIGMA,
        rng_seed: int = 0, recording_duration: float = defs.RECORDING_DURATION,
        sample_rate_hz: float = defs.SAMPLE_RATE_HZ) -> Dataset:
    """
    participants x 9 x repetitions recordings. Each participant has a
    preferred peak velocity drawn from @velocity_range; every gesture is
    placed at a random offset inside a rest-padded recording.
    """
    if participants < 1 or repetitions < 1:
        raise InvalidArgumentError('participants and repetitions must be >= 1')
    lo, hi = _check_range(velocity_range)
    n_recording = sample_count(recording_duration, sample_rate_hz)

    items = []
    for p in range(participants):
        preferred = make_rng(rng_seed, p).uniform(lo, hi)
        for label in GestureLabel:
            for rep in range(repetitions):
                rng = make_rng(rng_seed, p, label, rep)
                peak = min(preferred * rng.uniform(0.9, 1.1), defs.MAX_PEAK_VELOCITY)
                if label == GestureLabel.BEING_IDLE:
                    duration = recording_duration
                elif label.is_simple:
                    duration = rng.uniform(*defs.SIMPLE_DURATION_RANGE)
                else:
                    duration = rng.uniform(*defs.COMPLEX_DURATION_RANGE)
                duration = min(duration, recording_duration)
                active = gesture_velocities(label, peak, duration, noise_sigma, rng, sample_rate_hz=sample_rate_hz)
                lead = int(rng.integers(0, n_recording - len(active) + 1))
                omega = np.concatenate([
                    _noise(rng, lead, noise_sigma),
                    active,
                    _noise(rng, n_recording - lead - len(active), noise_sigma),
                ])
                items.append(LabeledGesture(
                    label,
                    MotionSequence.from_array(omega, sample_rate_hz),
                    f'p{p + 1:02d}-{label.abbreviation}-r{rep + 1}',
                ))

    provenance = (f'generate_dataset participants={participants} repetitions={repetitions} '
            f'velocity_range={lo!r},{hi!r} noise_sigma={noise_sigma!r} seed={rng_seed}')
    return Dataset(tuple(items), provenance)


def assemble_script(steps: Sequence[Tuple[GestureLabel, Optional[MotionSequence]]], noise_sigma: float,
        rng_seed: int, sample_rate_hz: float = defs.SAMPLE_RATE_HZ,
        lead_in: float = defs.SCRIPT_LEAD_IN,
        neutral_duration: float = defs.SCRIPT_NEUTRAL_DURATION,
        start_offset: int = defs.SCRIPT_START_OFFSET) -> Tuple[MotionSequence, List[ScriptSegment]]:
    """
    Join script @steps into one stream. A step with no motion is rest of
    @neutral_duration seconds. Gestures start @start_offset samples past a
    window boundary so every run of the script sees the same alignment.
    """
    rng = np.random.default_rng(rng_seed)
    parts = []
    segments = []
    cursor = 0

    def rest(n: int) -> None:
        nonlocal cursor
        if n <= 0:
            return
        parts.append(_noise(rng, n, noise_sigma))
        if segments and segments[-1].label == GestureLabel.BEING_IDLE and segments[-1].stop == cursor:
            segments[-1] = ScriptSegment(GestureLabel.BEING_IDLE, segments[-1].start, cursor + n)
        else:
            segments.append(ScriptSegment(GestureLabel.BEING_IDLE, cursor, cursor + n))
        cursor += n

    rest(sample_count(lead_in, sample_rate_hz))
    for label, motion in steps:
        label = GestureLabel(label)
        if motion is None:
            if label != GestureLabel.BEING_IDLE:
                raise InvalidArgumentError(f'Script step {label.display_name} has no motion')
            rest(sample_count(neutral_duration, sample_rate_hz))
            continue
        if label != GestureLabel.BEING_IDLE:
            rest((start_offset - cursor) % defs.BUFFER_LEN)
        parts.append(np.asarray(motion.omega))
        segments.append(ScriptSegment(label, cursor, cursor + len(motion)))
        cursor += len(motion)

    omega = np.concatenate(parts) if parts else np.zeros((0, 3))
    return MotionSequence.from_array(omega, sample_rate_hz), segments


def synthesize_script(labels: Sequence[GestureLabel] = DEFAULT_SCRIPT,
        peak_velocity: float = defs.SCRIPT_PEAK_VELOCITY, noise_sigma: float = defs.SCRIPT_NOISE_SIGMA,
        rng_seed: int = 0, sample_rate_hz: float = defs.SAMPLE_RATE_HZ) -> Tuple[MotionSequence, List[ScriptSegment]]:
    """
    The real-time evaluation protocol as one continuous stream.
    BeingIdle entries are the neutral steps between gestures.
    """
    steps = []
    for i, label in enumerate(labels):
        label = GestureLabel(label)
        if label == GestureLabel.BEING_IDLE:
            steps.append((label, None))
            continue
        duration = defs.SCRIPT_COMPLEX_DURATION if label.is_complex else defs.SCRIPT_SIMPLE_DURATION
        rng = np.random.default_rng(derive_seed(rng_seed, i))
        omega = gesture_velocities(label, peak_velocity, duration, noise_sigma, rng, sample_rate_hz=sample_rate_hz)
        steps.append((label, MotionSequence.from_array(omega, sample_rate_hz)))
    return assemble_script(steps, noise_sigma, derive_seed(rng_seed, len(labels)), sample_rate_hz)


def parse_script(text: str) -> List[GestureLabel]:
    """
    Parse a comma separated script such as "RL,neutral,RR,neutral".
    """
    tokens = [t for t in (s.strip() for s in text.split(',')) if t]
    if not tokens:
        raise InvalidArgumentError('Empty gesture script')
    return [GestureLabel.parse(t) for t in tokens]
