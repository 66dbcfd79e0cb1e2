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

    Test the streaming cascade and model files.

    2026-Oct-19  CHMM developers  Created this.
"""
import json
import os
from dataclasses import replace

import numpy as np
import pytest

from chmm.cascade import (CascadeModel, CascadeState, GestureEvent, cascade_init, cascade_step, format_model,
        load_model, output_select, save_model)
from chmm.errors import ArtifactIOError, InvalidArgumentError, UnsupportedVersionError, UsageError, ValidationError
from chmm.structs import AngularVelocitySample, EventKind, GestureLabel, MotionSequence
from chmm.training import classify_simple_window
from chmm.vq import quantize_sequence


def zeros(n):
    return MotionSequence.from_array(np.zeros((n, 3)))


def test_output_select():
    """
    A complex score above its threshold overrides the simple layer.
    """
    p_s = [-9.0, -1.0, -5.0, -5.0, -5.0, -5.0, -5.0]
    assert output_select(p_s, None, -5.0, -4.0) == GestureLabel.ROTATING_LEFT
    assert output_select(p_s, [-6.0, -7.0], -5.0, -4.0) == GestureLabel.ROTATING_LEFT
    assert output_select(p_s, [-4.9, -7.0], -5.0, -4.0) == GestureLabel.SHAKING
    assert output_select(p_s, [-6.0, -3.0], -5.0, -4.0) == GestureLabel.NODDING
    assert output_select([-1.0] * 7, None, -5.0, -4.0) == GestureLabel.BEING_IDLE
    with pytest.raises(InvalidArgumentError):
        output_select(p_s[:6], None, -5.0, -4.0)
    with pytest.raises(InvalidArgumentError):
        output_select(p_s, [-1.0], -5.0, -4.0)


def test_step_needs_model():
    """
    A state built without a model refuses samples.
    """
    with pytest.raises(UsageError):
        CascadeState().step(AngularVelocitySample(0, (0.0, 0.0, 0.0)))


def test_init_validates_model(model):
    """
    cascade_init refuses models that break their invariants.
    """
    assert cascade_init(model).frames_seen == 0
    with pytest.raises(ValidationError):
        cascade_init(replace(model, runtime_tau_shake=1.0))
    with pytest.raises(ValidationError):
        cascade_init(replace(model, simple_models=model.simple_models[:6]))
    with pytest.raises(ValidationError):
        cascade_init(replace(model, idle_symbols=frozenset({0})))


def test_streaming_matches_offline(model, dataset):
    """
    With complex recognition disabled, every boundary reports the offline
    classification of the same window.
    """
    simple_only = replace(model, runtime_tau_shake=0.0, runtime_tau_nod=0.0)
    for item in dataset.items[:40:4]:
        state = cascade_init(simple_only)
        events = state.run(item.motion)
        symbols = quantize_sequence(model.codebook, item.motion.omega)
        assert len(events) == len(item.motion) // 10
        for i, event in enumerate(events):
            label, scores = classify_simple_window(model.simple_models, symbols[i * 10:(i + 1) * 10])
            assert event.kind == EventKind.SIMPLE
            assert event.trigger_frame == i * 10 + 9
            assert event.label == label
            assert event.score == scores[label - 1]


def test_complex_win_clears_queue(model):
    """
    A complex win empties the meta-symbol queue so the next one needs a full queue again.
    """
    eager = replace(model, runtime_tau_shake=-1e9, runtime_tau_nod=-1e9)
    state = cascade_init(eager)
    events = []
    for sample in zeros(300):
        event = cascade_step(state, sample)
        if event is None:
            continue
        events.append(event)
        if event.kind == EventKind.COMPLEX:
            assert len(state.meta_queue) == 0
        else:
            assert len(state.meta_queue) == state.boundaries % 10
    assert [e.trigger_frame for e in events if e.kind == EventKind.COMPLEX] == [99, 199, 299]
    assert state.frames_seen == 300
    assert state.last_complex_scores[1] == 30


def test_reset(model):
    """
    reset forgets buffered symbols and the queue.
    """
    state = cascade_init(model)
    state.run(zeros(25))
    assert len(state.symbol_buffer) == 5
    state.reset()
    assert state.symbol_buffer == []
    assert len(state.meta_queue) == 0
    assert state.meta_queue.maxlen == model.queue_len
    assert state.last_simple_scores is None


def test_gesture_event_json():
    """
    Events serialize to compact JSON and kinds must match labels.
    """
    event = GestureEvent(9, 120, 'complex', -3.5)
    assert event.to_json() == '{"frame":120,"label":9,"name":"Nodding","kind":"complex","score":-3.5}'
    assert GestureEvent(GestureLabel.TILTING_UPWARD, 9, EventKind.SIMPLE, -1.0).to_dict()['name'] == 'TiltingUpward'
    with pytest.raises(ValidationError):
        GestureEvent(8, 1, 'simple', -1.0)
    with pytest.raises(ValidationError):
        GestureEvent(2, 1, 'complex', -1.0)


def test_save_and_load(model, tmp_path):
    """
    A saved model loads back equal and rewrites to identical bytes.
    """
    path = os.path.join(tmp_path, 'model.json')
    save_model(model, path)
    loaded = load_model(path)
    assert loaded == model
    with open(path) as f:
        assert f.read() == format_model(loaded)
    other = os.path.join(tmp_path, 'again.json')
    save_model(loaded, other)
    with open(path, 'rb') as a, open(other, 'rb') as b:
        assert a.read() == b.read()


def test_loaded_model_streams_identically(model, tmp_path):
    """
    A reloaded model emits the same events as the original.
    """
    path = os.path.join(tmp_path, 'model.json')
    save_model(model, path)
    motion = MotionSequence.from_array(np.random.default_rng(0).normal(0, 1.0, size=(400, 3)))
    assert cascade_init(load_model(path)).run(motion) == cascade_init(model).run(motion)


def test_model_file_errors(model, tmp_path):
    """
    Missing, foreign, outdated and incomplete model files are reported.
    """
    with pytest.raises(ArtifactIOError):
        load_model(os.path.join(tmp_path, 'missing.json'))

    garbage = os.path.join(tmp_path, 'garbage.json')
    with open(garbage, 'w') as f:
        f.write('not json')
    with pytest.raises(ValidationError):
        load_model(garbage)

    d = model.to_dict()
    with pytest.raises(UnsupportedVersionError):
        CascadeModel.from_dict(dict(d, format_version=2))
    incomplete = dict(d)
    del incomplete['runtime_tau_nod']
    with pytest.raises(ValidationError) as e:
        CascadeModel.from_dict(incomplete)
    assert "missing field 'runtime_tau_nod'" in str(e.value)

    broken = json.loads(json.dumps(d))
    broken['simple_models'][0]['transition'][0][0] += 0.5
    path = os.path.join(tmp_path, 'broken.json')
    with open(path, 'w') as f:
        json.dump(broken, f)
    with pytest.raises(ValidationError) as e:
        load_model(path)
    assert any(v.startswith('simple_models[1]: transition row 1 sums to') for v in e.value.violations)

    with pytest.raises(ValidationError):
        save_model(replace(model, runtime_tau_nod=float('nan')), os.path.join(tmp_path, 'nan.json'))
