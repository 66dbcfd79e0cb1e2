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

    Reading and writing the line-delimited dataset format:

        chmm-dataset v1 rate=75.0
        # provenance <free text>
        # gesture label=2 id=p01-RL-r1
        0,0.0123,-0.0041,0.0007
        ...
        <blank line>

    2026-Oct-19  CHMM developers  Created this.
"""

import math
import re
from typing import List, Tuple

from chmm.errors import ArtifactIOError, CHMMError, DatasetParseError, UnsupportedVersionError, ValidationError
from chmm.logger import get_logger
from chmm.structs import GestureLabel, LabeledGesture, MotionSequence, Dataset
from chmm import defs

logger = get_logger(__name__)

header_re = re.compile(r'^(\S+) (\S+) rate=(\S+)$')
gesture_re = re.compile(r'^# gesture label=(\S*) id=(.*)$')
PROVENANCE_PREFIX = '# provenance '


def format_dataset(dataset: Dataset) -> str:
    lines = [f'{defs.DATASET_MAGIC} {defs.DATASET_FORMAT_VERSION} rate={dataset.sample_rate_hz!r}']
    if dataset.provenance:
        lines.append(PROVENANCE_PREFIX + ' '.join(dataset.provenance.splitlines()))
    for item in dataset.items:
        lines.append(f'# gesture label={int(item.label)} id={item.gesture_id}')
        for frame, (yaw, pitch, roll) in zip(item.motion.frames.tolist(), item.motion.omega.tolist()):
            lines.append(f'{frame},{yaw!r},{pitch!r},{roll!r}')
        lines.append('')
    return '\n'.join(lines) + '\n'


def save_dataset(dataset: Dataset, path: str) -> None:
    rates = {item.motion.sample_rate_hz for item in dataset.items}
    if len(rates) > 1:
        raise ValidationError('Dataset mixes sample rates', [f'rates {sorted(rates)}'])
    text = format_dataset(dataset)
    try:
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
    except OSError as e:
        raise ArtifactIOError(path, e.strerror or str(e)) from e
    logger.debug(f'Saved {len(dataset)} gestures to {path}')


def _parse_record(path: str, lineno: int, line: str) -> Tuple[int, Tuple[float, float, float]]:
    fields = line.split(',')
    if len(fields) != 4:
        raise DatasetParseError(path, lineno, f'expected 4 fields <frame>,<yaw>,<pitch>,<roll>, got {len(fields)}')
    try:
        frame = int(fields[0])
        omega = tuple(float(f) for f in fields[1:])
    except ValueError:
        raise DatasetParseError(path, lineno, f'malformed record {line!r}') from None
    if frame < 0:
        raise DatasetParseError(path, lineno, f'negative frame index {frame}')
    if not all(math.isfinite(c) for c in omega):
        raise DatasetParseError(path, lineno, 'non-finite angular velocity')
    return frame, omega


def parse_dataset(text: str, path: str = '<string>') -> Dataset:
    lines = text.split('\n')
    if lines and lines[-1] == '':
        lines.pop()
    if not lines:
        raise DatasetParseError(path, 1, 'missing header')

    match = header_re.match(lines[0])
    if not match or match[1] != defs.DATASET_MAGIC:
        raise DatasetParseError(path, 1, f'expected header "{defs.DATASET_MAGIC} {defs.DATASET_FORMAT_VERSION} rate=<hz>"')
    if match[2] != defs.DATASET_FORMAT_VERSION:
        raise UnsupportedVersionError(f'{path}: dataset format {match[2]} is not supported')
    try:
        rate = float(match[3])
    except ValueError:
        raise DatasetParseError(path, 1, f'bad sample rate {match[3]!r}') from None
    if not (rate > 0 and math.isfinite(rate)):
        raise DatasetParseError(path, 1, f'sample rate must be positive, got {match[3]}')

    provenance = ''
    items: List[LabeledGesture] = []
    block = None

    def close_block() -> None:
        label, gesture_id, start, frames, omega = block
        try:
            items.append(LabeledGesture(label, MotionSequence(frames, omega, rate), gesture_id))
        except CHMMError as e:
            raise DatasetParseError(path, start, f'gesture {gesture_id!r}: {e}') from None

    for lineno, line in enumerate(lines[1:], start=2):
        if lineno == 2 and line.startswith(PROVENANCE_PREFIX):
            provenance = line[len(PROVENANCE_PREFIX):]
            continue
        if not line.strip():
            if block is not None:
                close_block()
                block = None
            continue
        if line.startswith('#'):
            match = gesture_re.match(line)
            if not match:
                raise DatasetParseError(path, lineno, f'unrecognized directive {line!r}')
            if block is not None:
                raise DatasetParseError(path, lineno, 'gesture block not terminated by a blank line')
            try:
                value = int(match[1])
            except ValueError:
                raise DatasetParseError(path, lineno, f'label {match[1]!r} is not an integer') from None
            if not min(GestureLabel) <= value <= max(GestureLabel):
                raise ValidationError(f'{path}:{lineno}: invalid gesture', [f'label {value} outside 1..9'])
            block = (GestureLabel(value), match[2], lineno, [], [])
            continue
        if block is None:
            raise DatasetParseError(path, lineno, 'record outside a gesture block')
        frame, omega = _parse_record(path, lineno, line)
        block[3].append(frame)
        block[4].append(omega)

    if block is not None:
        close_block()

    return Dataset(tuple(items), provenance)


def load_dataset(path: str) -> Dataset:
    try:
        with open(path, 'r', encoding='utf-8', newline='') as f:
            text = f.read()
    except OSError as e:
        raise ArtifactIOError(path, e.strerror or str(e)) from e
    dataset = parse_dataset(text, path)
    logger.debug(f'Loaded {len(dataset)} gestures from {path}')
    return dataset
