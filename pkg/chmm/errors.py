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

    Exceptions raised by the CHMM library.

    2026-Oct-19  CHMM developers  Created this.
"""

from typing import List, Optional


class CHMMError(Exception):
    """
    Base class for every error raised by CHMM.
    """


class InvalidArgumentError(CHMMError, ValueError):
    """
    An operation was called with an argument outside its domain.
    """


class ValidationError(CHMMError, ValueError):
    """
    A model, dataset or split violates one or more invariants.
    """
    def __init__(self, message: str, violations: Optional[List[str]] = None):
        self.violations = list(violations) if violations else []
        if self.violations:
            message = f'{message}: {"; ".join(self.violations)}'
        super().__init__(message)


class DatasetParseError(ValidationError):
    """
    A dataset file contains a malformed record.
    """
    def __init__(self, path: str, lineno: int, reason: str):
        self.path = path
        self.lineno = lineno
        super().__init__(f'{path}:{lineno}: {reason}')


class UnsupportedVersionError(CHMMError, ValueError):
    """
    A model file was written with a format version we cannot read.
    """


class UsageError(CHMMError, RuntimeError):
    """
    An object was used in a state that does not allow the operation.
    """


class ArtifactIOError(CHMMError, OSError):
    """
    Reading or writing a dataset, model or report failed.
    """
    def __init__(self, path: str, reason: str):
        self.path = path
        super().__init__(f'{path}: {reason}')


class ServiceError(CHMMError, RuntimeError):
    """
    The gesture server or status API could not start.
    """
