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

    Status API of the gesture daemon, served over a Unix domain socket.

    2026-Oct-19  CHMM developers  Created this.
"""

from http import HTTPStatus
import datetime as dt
import logging
from typing import List, Dict, NoReturn, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel
from uvicorn.config import LOGGING_CONFIG
import uvicorn

from chmm import defs
from chmm.cascade import CascadeModel
from chmm.errors import CHMMError
from chmm.harness import replay
from chmm.server import SessionRegistry
from chmm.structs import MotionSequence
from chmm.version import __version__
from chmm.logger import get_logger

app = FastAPI()
logger = get_logger(__name__)

# Monkeypatch uvicorn to not hijack root logger
try:
    LOGGING_CONFIG['loggers']['uvicorn'] = LOGGING_CONFIG['loggers']['']
    del LOGGING_CONFIG['loggers']['']
except KeyError:
    pass


class ClassifyRequest(BaseModel):
    """
    Rows of [frame, yaw_rate, pitch_rate, roll_rate].
    """
    samples: List[List[float]]


class API:
    model: Optional[CascadeModel] = None
    registry: Optional[SessionRegistry] = None
    port: Optional[int] = None

    @classmethod
    def connect(cls, model: CascadeModel, registry: SessionRegistry, port: Optional[int] = None) -> None:
        cls.model = model
        cls.registry = registry
        cls.port = port

    @staticmethod
    def serve_forever() -> NoReturn:
        uvicorn.run(
            app,
            uds=defs.CHMM_SOCK,
            log_level=logging.WARNING,
            log_config=LOGGING_CONFIG,
        )

    @staticmethod
    def _require_model() -> CascadeModel:
        if API.model is None:
            raise HTTPException(HTTPStatus.SERVICE_UNAVAILABLE, 'No model is loaded.')
        return API.model

    @staticmethod
    @app.get('/status')
    def get_status() -> Dict:
        """
        Returns the status of the gesture daemon.
        """
        model = API._require_model()
        try:
            uptime = dt.datetime.now() - API.registry.started_at
            return {
                    'CHMM Version': __version__,
                    'Port': API.port,
                    'Uptime': str(uptime).split('.')[0],
                    'Sessions': f'{len(API.registry)} ({API.registry.total_sessions} total)',
                    'Gestures': len(API.registry.gestures()),
                    'Codebook Size': model.codebook.k,
                    'Simple States': model.simple_models[0].n_states,
                    'Window': f'{model.buffer_len} samples at {model.sample_rate_hz:g} Hz',
                    'Queue': model.queue_len,
                    'Shake Threshold': model.runtime_tau_shake,
                    'Nod Threshold': model.runtime_tau_nod,
                    }
        except Exception as e:
            logger.error('', exc_info=e)
            raise HTTPException(HTTPStatus.BAD_REQUEST, f'Unable to get status.')

    @staticmethod
    @app.get('/sessions')
    def get_sessions() -> List[Dict]:
        """
        Returns the live gesture server connections.
        """
        if API.registry is None:
            raise HTTPException(HTTPStatus.SERVICE_UNAVAILABLE, 'Gesture server is not running.')
        return API.registry.sessions()

    @staticmethod
    @app.get('/gestures')
    def get_gestures() -> List[Dict]:
        """
        Returns recently recognized complex gestures, oldest first.
        """
        if API.registry is None:
            raise HTTPException(HTTPStatus.SERVICE_UNAVAILABLE, 'Gesture server is not running.')
        return API.registry.gestures()

    @staticmethod
    @app.post('/classify')
    def classify(request: ClassifyRequest) -> Dict:
        """
        Replays posted samples through a fresh cascade and returns its events.
        """
        model = API._require_model()
        bad = [i + 1 for i, row in enumerate(request.samples) if len(row) != 4]
        if bad:
            raise HTTPException(HTTPStatus.UNPROCESSABLE_ENTITY,
                    f'Sample {bad[0]} must be [frame, yaw_rate, pitch_rate, roll_rate].')
        fractional = [i + 1 for i, row in enumerate(request.samples) if not float(row[0]).is_integer()]
        if fractional:
            raise HTTPException(HTTPStatus.UNPROCESSABLE_ENTITY,
                    f'Sample {fractional[0]} has frame {request.samples[fractional[0] - 1][0]}, expected an integer.')
        try:
            motion = MotionSequence([int(r[0]) for r in request.samples],
                    [r[1:] for r in request.samples], model.sample_rate_hz)
            report = replay(model, motion)
        except CHMMError as e:
            raise HTTPException(HTTPStatus.BAD_REQUEST, str(e))
        except Exception as e:
            logger.error('', exc_info=e)
            raise HTTPException(HTTPStatus.BAD_REQUEST, f'Unable to classify samples.')
        return {
                'frames': report.frames_processed,
                'events': [e.to_dict() for e in report.events],
                'mean_step_time_ms': report.mean_step_time_ms,
                'max_step_time_ms': report.max_step_time_ms,
                }
