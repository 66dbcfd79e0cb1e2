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

    Replays recorded or synthesized motion through the cascade in real
    time and measures recognition latency and per-step processing time.

    2026-Oct-19  CHMM developers  Created this.
"""

import math
import time
from collections import OrderedDict
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from chmm.cascade import CascadeModel, GestureEvent, cascade_init
from chmm.errors import InvalidArgumentError
from chmm.evaluation import LatencyRecord, detect_motion_onset, latency_record
from chmm.gestures import DEFAULT_SCRIPT, assemble_script
from chmm.logger import get_logger
from chmm.structs import GestureLabel, MotionSequence, Dataset, ScriptSegment
from chmm import defs

logger = get_logger(__name__)


@dataclass(frozen=True)
class ReplayReport:
    events: Tuple[GestureEvent, ...]
    latencies: Tuple[LatencyRecord, ...]
    frames_processed: int
    max_step_time_ms: float
    mean_step_time_ms: float
    budget_violations: int = 0
    missed: Tuple[ScriptSegment, ...] = ()

    @property
    def within_budget(self) -> bool:
        return self.budget_violations == 0

    def complex_events(self) -> List[GestureEvent]:
        return [e for e in self.events if e.label.is_complex]


def match_latencies(motion: MotionSequence, segments: Sequence[ScriptSegment], events: Sequence[GestureEvent],
        omega_init: float = defs.OMEGA_INIT) -> Tuple[List[LatencyRecord], List[ScriptSegment]]:
    """
    Pair each non-idle segment's motion onset with the first event of the
    same label triggered before the next non-idle segment begins.
    """
    gestures = [s for s in segments if s.label != GestureLabel.BEING_IDLE]
    records, missed = [], []
    for i, segment in enumerate(gestures):
        if segment.stop > len(motion):
            raise InvalidArgumentError(f'Segment [{segment.start}, {segment.stop}) exceeds the stream')
        onset = detect_motion_onset(motion.slice(segment.start, segment.stop), omega_init)
        if onset is None:
            missed.append(segment)
            continue
        if i + 1 < len(gestures) and gestures[i + 1].start < len(motion):
            limit = int(motion.frames[gestures[i + 1].start])
        else:
            limit = math.inf
        match = next((e for e in events if onset <= e.trigger_frame < limit and e.label == segment.label), None)
        if match is None:
            missed.append(segment)
            continue
        records.append(latency_record(segment.label, onset, match.trigger_frame, motion.sample_rate_hz))
    return records, missed


def replay(model: CascadeModel, motion: MotionSequence, rate_multiplier: float = math.inf,
        expected_gestures: Optional[Sequence[ScriptSegment]] = None,
        budget_ms: float = defs.STEP_BUDGET_MS) -> ReplayReport:
    """
    Feed @motion through a fresh cascade, paced at the model's sample rate
    times @rate_multiplier (inf replays as fast as possible).
    """
    if not rate_multiplier > 0:
        raise InvalidArgumentError(f'rate_multiplier must be positive, got {rate_multiplier}')
    state = cascade_init(model)
    period = 0.0 if math.isinf(rate_multiplier) else 1.0 / (model.sample_rate_hz * rate_multiplier)

    events = []
    step_times = np.zeros(len(motion))
    start = time.monotonic()
    for i, sample in enumerate(motion):
        if period:
            delay = start + i * period - time.monotonic()
            if delay > 0:
                time.sleep(delay)
        t0 = time.perf_counter()
        event = state.step(sample)
        step_times[i] = (time.perf_counter() - t0) * 1000.0
        if event is not None:
            events.append(event)

    latencies, missed = [], []
    if expected_gestures:
        latencies, missed = match_latencies(motion, expected_gestures, events)
    violations = int(np.count_nonzero(step_times > budget_ms))
    if violations:
        logger.warning(f'{violations} of {len(motion)} steps exceeded the {budget_ms} ms budget')

    return ReplayReport(
        events=tuple(events),
        latencies=tuple(latencies),
        frames_processed=len(motion),
        max_step_time_ms=float(step_times.max()) if len(motion) else 0.0,
        mean_step_time_ms=float(step_times.mean()) if len(motion) else 0.0,
        budget_violations=violations,
        missed=tuple(missed),
    )


def participant_of(gesture_id: str) -> str:
    return gesture_id.split('-', 1)[0] if gesture_id else ''


def dataset_scripts(dataset: Dataset, labels: Sequence[GestureLabel] = DEFAULT_SCRIPT,
        rng_seed: int = 0, noise_sigma: float = defs.NOISE_SIGMA) -> Dict[str, Tuple[MotionSequence, List[ScriptSegment]]]:
    """
    One scripted stream per participant, built from the first repetition
    of each scripted gesture with rest in place of the neutral steps.
    """
    recordings: Dict[str, Dict[GestureLabel, MotionSequence]] = OrderedDict()
    for item in sorted(dataset.items, key=lambda i: i.gesture_id):
        per_label = recordings.setdefault(participant_of(item.gesture_id), {})
        per_label.setdefault(item.label, item.motion)

    scripts = OrderedDict()
    for n, (participant, per_label) in enumerate(recordings.items()):
        steps = []
        for label in labels:
            label = GestureLabel(label)
            if label == GestureLabel.BEING_IDLE:
                steps.append((label, None))
            elif label in per_label:
                steps.append((label, per_label[label]))
            else:
                logger.warning(f'{participant} has no {label.display_name} recording; skipping it')
        scripts[participant] = assemble_script(steps, noise_sigma, rng_seed + n, dataset.sample_rate_hz)
    return scripts
