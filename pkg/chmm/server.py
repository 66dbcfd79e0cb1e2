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

    Line-delimited TCP endpoint. Each connection streams
    "frame,yaw,pitch,roll" lines and receives one JSON line per event.

    2026-Oct-19  CHMM developers  Created this.
"""

import asyncio
import datetime as dt
import itertools
import json
import math
import threading
from collections import deque
from dataclasses import dataclass, field
from typing import Deque, Dict, List, NoReturn, Optional

import uvloop
from ratelimit import limits

from chmm.cascade import CascadeModel, CascadeState, GestureEvent
from chmm.errors import InvalidArgumentError, ServiceError
from chmm.logger import get_logger
from chmm.structs import AngularVelocitySample
from chmm import defs

logger = get_logger(__name__)


def parse_sample_line(line: str) -> AngularVelocitySample:
    """
    Parse one "<frame>,<yaw_rate>,<pitch_rate>,<roll_rate>" line.
    """
    fields = [f.strip() for f in line.strip().split(',')]
    if len(fields) != 4:
        raise InvalidArgumentError(f'expected 4 comma separated fields, got {len(fields)}')
    try:
        frame = int(fields[0])
    except ValueError:
        raise InvalidArgumentError(f'frame {fields[0]!r} is not an integer') from None
    try:
        omega = tuple(float(f) for f in fields[1:])
    except ValueError:
        raise InvalidArgumentError(f'angular velocity {",".join(fields[1:])!r} is not numeric') from None
    if not all(math.isfinite(c) for c in omega):
        raise InvalidArgumentError('angular velocity must be finite')
    return AngularVelocitySample(frame, omega)


def error_line(message: str, lineno: int) -> str:
    return json.dumps({'error': message, 'line': lineno}, separators=(',', ':'))


@limits(calls=defs.MALFORMED_LOG_RATE, period=1, raise_on_limit=False)
def _warn_malformed(peer: str, lineno: int, reason: str) -> None:
    logger.warning(f'Malformed line {lineno} from {peer}: {reason}')


@dataclass
class Session:
    session_id: int
    peer: str
    connected_at: dt.datetime = field(default_factory=dt.datetime.now)
    frames: int = 0
    events: int = 0
    errors: int = 0
    last_event: Optional[GestureEvent] = None

    def to_dict(self) -> Dict:
        return {
            'id': self.session_id,
            'peer': self.peer,
            'connected_at': self.connected_at.isoformat(timespec='seconds'),
            'frames': self.frames,
            'events': self.events,
            'errors': self.errors,
            'last_event': self.last_event.to_dict() if self.last_event else None,
        }


class SessionRegistry:
    """
    Live connections and recently recognized complex gestures.
    Shared between the server loop and the status API, so every access
    goes through the lock.
    """
    def __init__(self, recent: int = defs.RECENT_GESTURES):
        self._lock = threading.Lock()
        self._ids = itertools.count(1)
        self._sessions: Dict[int, Session] = {}
        self._gestures: Deque[Dict] = deque(maxlen=recent)
        self.total_sessions = 0
        self.started_at = dt.datetime.now()

    def open(self, peer: str) -> Session:
        with self._lock:
            session = Session(next(self._ids), peer)
            self._sessions[session.session_id] = session
            self.total_sessions += 1
            return session

    def close(self, session: Session) -> None:
        with self._lock:
            self._sessions.pop(session.session_id, None)

    def record_frame(self, session: Session, event: Optional[GestureEvent]) -> None:
        with self._lock:
            session.frames += 1
            if event is None:
                return
            session.events += 1
            session.last_event = event
            if event.label.is_complex:
                self._gestures.append(dict(event.to_dict(), session=session.session_id))

    def record_error(self, session: Session) -> None:
        with self._lock:
            session.errors += 1

    def sessions(self) -> List[Dict]:
        with self._lock:
            return [s.to_dict() for s in self._sessions.values()]

    def gestures(self) -> List[Dict]:
        with self._lock:
            return list(self._gestures)

    def __len__(self) -> int:
        with self._lock:
            return len(self._sessions)


class GestureServer:
    """
    One CascadeState per connection over a shared read-only model.
    """
    def __init__(self, model: CascadeModel, host: str = defs.CHMM_HOST, port: int = defs.CHMM_PORT,
            registry: Optional[SessionRegistry] = None):
        model.validate()
        self.model = model
        self.host = host
        self.port = port
        self.registry = registry if registry is not None else SessionRegistry()
        self._server: Optional[asyncio.AbstractServer] = None

    @property
    def bound_port(self) -> int:
        """
        The port actually bound, which differs from @port when @port is 0.
        """
        if self._server is None:
            raise ServiceError('Gesture server is not running')
        return self._server.sockets[0].getsockname()[1]

    async def start(self) -> asyncio.AbstractServer:
        try:
            self._server = await asyncio.start_server(self.handle, self.host, self.port)
        except OSError as e:
            raise ServiceError(f'Unable to bind {self.host}:{self.port}: {e.strerror or e}') from e
        logger.info(f'Gesture server listening on {self.host}:{self.bound_port}')
        return self._server

    async def stop(self) -> None:
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()
            self._server = None

    async def serve_forever(self) -> NoReturn:
        server = self._server or await self.start()
        async with server:
            await server.serve_forever()

    async def handle(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
        peer = writer.get_extra_info('peername')
        peer = f'{peer[0]}:{peer[1]}' if isinstance(peer, tuple) else str(peer)
        session = self.registry.open(peer)
        state = CascadeState(self.model)
        logger.debug(f'Session {session.session_id} opened by {peer}')
        try:
            await self._session_loop(reader, writer, session, state)
        except (ConnectionError, asyncio.IncompleteReadError):
            pass
        finally:
            self.registry.close(session)
            writer.close()
            try:
                await writer.wait_closed()
            except ConnectionError:
                pass
            logger.debug(f'Session {session.session_id} closed after {session.frames} frames')

    async def _session_loop(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter,
            session: Session, state: CascadeState) -> None:
        lineno = 0
        while True:
            try:
                raw = await reader.readline()
            except ValueError:
                # Line exceeded the stream limit; the rest of the stream cannot be framed
                writer.write((error_line('line too long', lineno + 1) + '\n').encode())
                await writer.drain()
                return
            if not raw:
                return
            lineno += 1
            line = raw.decode('utf-8', errors='replace').strip()
            if not line:
                continue
            try:
                sample = parse_sample_line(line)
            except InvalidArgumentError as e:
                self.registry.record_error(session)
                _warn_malformed(session.peer, lineno, str(e))
                writer.write((error_line(str(e), lineno) + '\n').encode())
                await writer.drain()
                continue
            event = state.step(sample)
            self.registry.record_frame(session, event)
            if event is not None:
                writer.write((event.to_json() + '\n').encode())
                await writer.drain()


def run_server(server: GestureServer) -> NoReturn:
    """
    Run @server on a fresh uvloop event loop in the calling thread.
    """
    loop = uvloop.new_event_loop()
    asyncio.set_event_loop(loop)
    try:
        loop.run_until_complete(server.start())
        loop.run_until_complete(server.serve_forever())
    finally:
        loop.close()


def serve(model: CascadeModel, port: int = defs.CHMM_PORT, host: str = defs.CHMM_HOST,
        registry: Optional[SessionRegistry] = None) -> NoReturn:
    run_server(GestureServer(model, host, port, registry))
