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

    Test the TCP gesture server over loopback.

    2026-Oct-19  CHMM developers  Created this.
"""
import asyncio
import json

import pytest

from chmm.cascade import cascade_init
from chmm.errors import InvalidArgumentError, ServiceError
from chmm.gestures import synthesize_script
from chmm.server import GestureServer, SessionRegistry, error_line, parse_sample_line
from chmm.structs import GestureLabel


def sample_lines(motion):
    return [f'{frame},{yaw!r},{pitch!r},{roll!r}'
            for frame, (yaw, pitch, roll) in zip(motion.frames.tolist(), motion.omega.tolist())]


async def exchange(port, lines):
    reader, writer = await asyncio.open_connection('127.0.0.1', port)
    writer.write(''.join(f'{line}\n' for line in lines).encode())
    await writer.drain()
    writer.write_eof()
    out = []
    while True:
        raw = await reader.readline()
        if not raw:
            break
        out.append(raw.decode().strip())
    writer.close()
    await writer.wait_closed()
    return out


def run_with_server(model, registry, client):
    async def main():
        server = GestureServer(model, '127.0.0.1', 0, registry)
        await server.start()
        try:
            return await client(server.bound_port)
        finally:
            await server.stop()
    return asyncio.run(main())


@pytest.fixture(scope='module')
def shaking():
    motion, _ = synthesize_script([GestureLabel.SHAKING, GestureLabel.BEING_IDLE], rng_seed=3)
    return motion


def test_stream_matches_offline(model, shaking):
    """
    The server answers a stream with the events the cascade emits offline.
    """
    expected = [e.to_json() for e in cascade_init(model).run(shaking)]
    registry = SessionRegistry()
    out = run_with_server(model, registry, lambda port: exchange(port, sample_lines(shaking)))
    assert out == expected
    assert sum(json.loads(line)['label'] == 8 for line in out) == 1
    assert registry.total_sessions == 1
    assert len(registry) == 0
    assert [g['label'] for g in registry.gestures()] == [json.loads(l)['label'] for l in out
            if json.loads(l)['kind'] == 'complex']
    assert all(g['session'] == 1 for g in registry.gestures())


def test_clients_are_isolated(model, shaking):
    """
    Concurrent connections each get their own cascade state.
    """
    expected = [e.to_json() for e in cascade_init(model).run(shaking)]
    lines = sample_lines(shaking)

    async def two_clients(port):
        return await asyncio.gather(exchange(port, lines), exchange(port, lines[:55]))

    registry = SessionRegistry()
    full, partial = run_with_server(model, registry, two_clients)
    assert full == expected
    assert partial == expected[:5]
    assert registry.total_sessions == 2


def test_malformed_lines_do_not_end_session(model):
    """
    A bad line is answered with an error and later samples are still processed.
    """
    lines = ['abc', ''] + [f'{i},0.0,0.0,0.0' for i in range(10)] + ['10,1,2']
    out = run_with_server(model, SessionRegistry(), lambda port: exchange(port, lines))
    assert len(out) == 3
    assert json.loads(out[0]) == {'error': 'expected 4 comma separated fields, got 1', 'line': 1}
    assert json.loads(out[1])['frame'] == 9
    assert json.loads(out[2])['line'] == 13


def test_bind_failure(model):
    """
    Binding a port that is already taken raises a service error.
    """
    async def main():
        first = GestureServer(model, '127.0.0.1', 0)
        await first.start()
        try:
            second = GestureServer(model, '127.0.0.1', first.bound_port)
            with pytest.raises(ServiceError):
                await second.start()
            with pytest.raises(ServiceError):
                second.bound_port
        finally:
            await first.stop()
    asyncio.run(main())


def test_parse_sample_line():
    """
    Sample lines need an integer frame and three finite velocities.
    """
    sample = parse_sample_line(' 12, 0.5,-1e-3 ,2 ')
    assert sample.frame == 12
    assert sample.omega == (0.5, -0.001, 2.0)
    for bad in ('1,2,3', '1,2,3,4,5', 'x,0,0,0', '1.5,0,0,0', '1,0,y,0', '1,0,nan,0', '1,inf,0,0', '-1,0,0,0'):
        with pytest.raises(InvalidArgumentError):
            parse_sample_line(bad)


def test_error_line():
    """
    Error lines are compact JSON.
    """
    assert error_line('bad', 4) == '{"error":"bad","line":4}'
