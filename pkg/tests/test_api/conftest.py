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

    Provide a fixture for a CHMM status API client.

    2026-Oct-19  CHMM developers  Created this.
"""

from fastapi.testclient import TestClient
import pytest

from chmm.api import app, API
from chmm.server import SessionRegistry

@pytest.fixture(scope='function')
def registry():
    return SessionRegistry()

@pytest.fixture(scope='function')
def client(model, registry):
    client = TestClient(app)
    API.connect(model, registry, 7575)

    yield client

    API.connect(None, None, None)
