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

    Start, stop and restart logic for chmmd.

    2026-Oct-19  CHMM developers  Created this.
"""

import time
import os, sys
import signal
import atexit
from typing import Union, NoReturn

from daemon import DaemonContext, pidfile

from chmm.errors import ServiceError
from chmm import defs
from chmm.logger import get_logger

logger = get_logger(__name__)

class DaemonMixin:
    def loop_forever(self):
        raise NotImplementedError('Implement loop_forever(self) in the subclass.')

    def check_socket(self) -> None:
        """
        Refuse to start over a stale status socket and remove ours on exit.
        uvicorn binds the socket itself.
        """
        if os.path.exists(defs.CHMM_SOCK):
            raise ServiceError(f'Unable to start daemon because {defs.CHMM_SOCK} exists in filesystem. '
                    'If this is a mistake, delete the file manually.')
        atexit.register(self._cleanup_socket)

    def _cleanup_socket(self):
        try:
            os.unlink(defs.CHMM_SOCK)
        except FileNotFoundError:
            pass
        except OSError as e:
            logger.error(f'Failed to unlink {defs.CHMM_SOCK}!', exc_info=e)

    def get_pid(self) -> Union[int, None]:
        """
        Get pid of the running daemon.
        """
        try:
            with open(defs.PIDFILE, 'r') as f:
               return int(f.read().strip())
        except (OSError, ValueError):
            return None

    def stop_daemon(self, in_restart: bool = False) -> None:
        """
        Stop the daemon.
        """
        pid = self.get_pid()
        if pid is None:
            if not in_restart:
                raise ServiceError('Attempted to stop the daemon, but it is not running')
            return
        try:
            os.kill(pid, signal.SIGTERM)
        except ProcessLookupError:
            if not in_restart:
                raise ServiceError(f'Attempted to kill daemon with pid {pid}, but no such process exists')

    def start_daemon(self) -> NoReturn:
        """
        Start the daemon.
        """
        if self.get_pid():
            raise ServiceError(f'CHMM daemon is already running! If you believe this is an error, '
                    f'try deleting {defs.PIDFILE}.')
        logger.info('Starting CHMM daemon...')
        with DaemonContext(
                umask=0o022,
                working_directory=defs.CHMM_DATA_DIR,
                pidfile=pidfile.TimeoutPIDLockFile(defs.PIDFILE),
                # Necessary to preserve logging
                files_preserve=[handler.stream for handler in get_logger().handlers if hasattr(handler, 'stream')]
                ):
            logger.info('CHMM daemon started successfully!')
            self.loop_forever()

    def restart_daemon(self) -> NoReturn:
        """
        Restart the daemon.
        """
        self.stop_daemon(in_restart=True)
        time.sleep(1)
        self.start_daemon()
