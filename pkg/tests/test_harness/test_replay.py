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

    Test scripted replay and latency matching.

    2026-Oct-19  CHMM developers  Created this.
"""
import math

import numpy as np
import pytest

from chmm.cli import parse_args
from chmm.errors import InvalidArgumentError
from chmm.gestures import DEFAULT_SCRIPT, synthesize_script
from chmm.harness import dataset_scripts, match_latencies, participant_of, replay
from chmm.cascade import GestureEvent
from chmm.structs import EventKind, GestureLabel, MotionSequence, ScriptSegment


@pytest.fixture(scope='module')
def script():
    return synthesize_script(rng_seed=0)


def complex_events_in(report, segment):
    return [e for e in report.complex_events() if segment.start <= e.trigger_frame < segment.stop]


def test_replay_script(model, script):
    """
    Every simple gesture is recognized after its onset within the latency
    bounds, and the shake raises exactly one Shaking event in time.
    """
    motion, segments = script
    report = replay(model, motion, expected_gestures=segments)
    assert report.frames_processed == len(motion)
    assert len(report.events) == len(motion) // 10

    simple = [r for r in report.latencies if r.gesture.is_simple]
    assert [r.gesture for r in simple] == [l for l in DEFAULT_SCRIPT if l.is_simple and l != GestureLabel.BEING_IDLE]
    assert 0.13 <= np.mean([r.latency_s for r in simple]) <= 0.35
    for record in report.latencies:
        assert record.trigger_frame >= record.onset_frame

    shake, = [s for s in segments if s.label == GestureLabel.SHAKING]
    nod, = [s for s in segments if s.label == GestureLabel.NODDING]
    events = complex_events_in(report, ScriptSegment(GestureLabel.SHAKING, shake.start, shake.start + 150))
    assert [e.label for e in events] == [GestureLabel.SHAKING]
    record, = [r for r in report.latencies if r.gesture == GestureLabel.SHAKING]
    assert 0.27 <= record.latency_s <= 1.1
    assert len(complex_events_in(report, ScriptSegment(GestureLabel.NODDING, nod.start, nod.start + 150))) <= 1
    assert {e.label for e in report.complex_events()} <= {GestureLabel.SHAKING, GestureLabel.NODDING}
    assert report.max_step_time_ms >= report.mean_step_time_ms > 0


def test_replay_real_time(model):
    """
    A paced replay of several thousand samples keeps every step inside the
    per-sample budget at 75 Hz.
    """
    motion, segments = synthesize_script(DEFAULT_SCRIPT * 5, rng_seed=9)
    assert len(motion) >= 5000
    report = replay(model, motion, rate_multiplier=1.0, expected_gestures=segments)
    assert report.frames_processed == len(motion)
    assert report.max_step_time_ms <= 13.0
    assert report.mean_step_time_ms <= 2.0
    assert report.budget_violations == 0


def test_rotations_are_not_shakes(model):
    """
    Isolated fast rotations and tilts never raise a complex event, while
    each shake raises exactly one.
    """
    labels = []
    for label in (GestureLabel.ROTATING_LEFT, GestureLabel.TILTING_UPWARD, GestureLabel.ROTATING_RIGHT,
            GestureLabel.SHAKING, GestureLabel.TILTING_DOWNWARD, GestureLabel.ROTATING_LEFT,
            GestureLabel.SHAKING):
        labels += [label, GestureLabel.BEING_IDLE]
    motion, segments = synthesize_script(labels, rng_seed=12)
    report = replay(model, motion, expected_gestures=segments)
    gestures = [s for s in segments if s.label != GestureLabel.BEING_IDLE]
    for segment, following in zip(gestures, gestures[1:] + [ScriptSegment(GestureLabel.BEING_IDLE, len(motion), len(motion))]):
        events = complex_events_in(report, ScriptSegment(segment.label, segment.start, following.start))
        if segment.label == GestureLabel.SHAKING:
            assert [e.label for e in events] == [GestureLabel.SHAKING]
        else:
            assert events == []


def test_replay_rate_does_not_change_events(model):
    """
    Pacing the replay changes timing only.
    """
    motion, segments = synthesize_script([GestureLabel.TILTING_UPWARD, GestureLabel.BEING_IDLE], rng_seed=4)
    fast = replay(model, motion, expected_gestures=segments)
    paced = replay(model, motion, rate_multiplier=40.0, expected_gestures=segments)
    assert fast.events == paced.events
    assert fast.latencies == paced.latencies
    with pytest.raises(InvalidArgumentError):
        replay(model, motion, rate_multiplier=0.0)


def test_idle_stream(model):
    """
    A stream of rest yields only BeingIdle.
    """
    rng = np.random.default_rng(1)
    motion = MotionSequence.from_array(rng.normal(0.0, 0.02, size=(600, 3)))
    report = replay(model, motion)
    assert len(report.events) == 60
    assert {e.label for e in report.events} == {GestureLabel.BEING_IDLE}
    assert report.latencies == ()


def test_match_latencies():
    """
    Each segment takes the first matching event between its onset and the next gesture.
    """
    omega = np.zeros((100, 3))
    omega[12:30, 0] = 1.0
    omega[60:80, 1] = 1.0
    motion = MotionSequence.from_array(omega)
    segments = [
        ScriptSegment(GestureLabel.BEING_IDLE, 0, 10),
        ScriptSegment(GestureLabel.ROTATING_LEFT, 10, 40),
        ScriptSegment(GestureLabel.BEING_IDLE, 40, 55),
        ScriptSegment(GestureLabel.TILTING_UPWARD, 55, 85),
        ScriptSegment(GestureLabel.BEING_IDLE, 85, 100),
    ]
    events = [
        GestureEvent(GestureLabel.ROTATING_LEFT, 9, EventKind.SIMPLE, -1.0),
        GestureEvent(GestureLabel.ROTATING_LEFT, 19, EventKind.SIMPLE, -1.0),
        GestureEvent(GestureLabel.ROTATING_LEFT, 29, EventKind.SIMPLE, -1.0),
        GestureEvent(GestureLabel.ROTATING_LEFT, 59, EventKind.SIMPLE, -1.0),
        GestureEvent(GestureLabel.TILTING_DOWNWARD, 69, EventKind.SIMPLE, -1.0),
    ]
    records, missed = match_latencies(motion, segments, events)
    assert len(records) == 1
    assert records[0].onset_frame == 12
    assert records[0].trigger_frame == 19
    assert records[0].latency_s == pytest.approx(7 / 75)
    assert missed == [segments[3]]

    with pytest.raises(InvalidArgumentError):
        match_latencies(motion, [ScriptSegment(GestureLabel.NODDING, 90, 120)], events)


def test_dataset_scripts(dataset):
    """
    Each participant gets one stream holding their scripted gestures.
    """
    scripts = dataset_scripts(dataset, rng_seed=2)
    assert list(scripts)[:2] == ['p01', 'p02']
    assert len(scripts) == 19
    motion, segments = scripts['p03']
    gestures = [s for s in segments if s.label != GestureLabel.BEING_IDLE]
    assert len(gestures) == 8
    assert all(s.stop - s.start == 150 for s in gestures)
    assert segments[-1].stop == len(motion)


def test_participant_of():
    """
    The participant is the first dash separated part of a gesture id.
    """
    assert participant_of('p07-RL-r2') == 'p07'
    assert participant_of('') == ''


def test_replay_needs_report():
    """
    replay and eval refuse to run without a report path.
    """
    with pytest.raises(SystemExit):
        parse_args(['replay', '--model', 'model.json'])
    with pytest.raises(SystemExit):
        parse_args(['eval', '--model', 'model.json', '--data', 'gestures.txt'])
    args = parse_args(['replay', '--model', 'model.json', '--report', 'latency.csv'])
    assert args.report == 'latency.csv'
