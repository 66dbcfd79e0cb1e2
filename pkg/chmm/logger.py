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

    Provides logging capabilities to the CHMM tools and daemon.

    2026-Oct-19  CHMM developers  Created this.
"""

import os
import re
import gzip
import shutil
from argparse import Namespace
import logging
from logging import handlers

from colorama import Fore, Style

from chmm import defs

class CHMMLoggerClass(logging.getLoggerClass()):
    """
    Custom logger class with levels for recognized gestures and training progress.
    """
    GESTURE = logging.WARN - 5
    TRAINING = logging.INFO - 5

    def __init__(self, name, level: int = logging.NOTSET) -> 'CHMMLoggerClass':
        super().__init__(name, level)

        logging.addLevelName(CHMMLoggerClass.GESTURE, "GESTURE")
        logging.addLevelName(CHMMLoggerClass.TRAINING, "TRAINING")

    def gesture(self, msg: str, *args, **kwargs) -> None:
        """
        Write a recognized complex gesture to logs.
        """
        if self.isEnabledFor(CHMMLoggerClass.GESTURE):
            self._log(CHMMLoggerClass.GESTURE, msg, args, **kwargs)

    def training(self, msg: str, *args, **kwargs) -> None:
        """
        Write training progress (Baum-Welch, K-Means, grid cells) to logs.
        """
        if self.isEnabledFor(CHMMLoggerClass.TRAINING):
            self._log(CHMMLoggerClass.TRAINING, msg, args, **kwargs)

logging.setLoggerClass(CHMMLoggerClass)

def gzip_namer(name: str) -> str:
    return f'{name}.gz'

def gzip_rotator(source: str, dest: str) -> None:
    """
    Compress a rolled-over log file into @dest and remove @source.
    """
    with open(source, 'rb') as sf, gzip.open(dest, 'wb') as df:
        shutil.copyfileobj(sf, df)
    os.unlink(source)

class CHMMFormatter(logging.Formatter):
    """
    One line per record: time, component, level, message.
    The component is the logger name below "chmm", or "chmm" itself.
    """
    default_msec_format = '%s.%03d'

    def __init__(self, colored: bool = False):
        super().__init__('[%(asctime)s] [%(component)s] [%(levelname)s] %(message)s')
        self.colored = colored

    def format(self, record: logging.LogRecord) -> str:
        record.component = record.name.rsplit('.', 1)[-1]
        record.levelname = record.levelname.lower()
        formatted = super().format(record)
        if self.colored:
            return color_log(formatted)
        return formatted

def setup_logger(args: Namespace) -> None:
    """
    Perform (most) logging setup. This function should be called
    from defs.init().
    """
    nolog = getattr(args, 'nolog', True)
    debug = getattr(args, 'debug', False)

    logger = get_logger()
    logger.setLevel(logging.DEBUG if debug else CHMMLoggerClass.TRAINING)

    # Calling init() twice must not duplicate output
    for handler in list(logger.handlers):
        if getattr(handler, '_chmm', False):
            logger.removeHandler(handler)

    if nolog:
        handler = logging.StreamHandler()
    else:
        os.makedirs(os.path.dirname(defs.LOGFILE), exist_ok=True)
        # Weekly on Monday, four weeks per file, a year of history
        handler = handlers.TimedRotatingFileHandler(defs.LOGFILE, when='w0', interval=4,
                backupCount=12)
        handler.namer = gzip_namer
        handler.rotator = gzip_rotator
    handler._chmm = True
    handler.setFormatter(CHMMFormatter(colored=nolog))
    logger.addHandler(handler)

    logger.debug('Logging initialized.')

def get_logger(name: str = 'chmm') -> CHMMLoggerClass:
    """
    Get the CHMM logger, or the child logger of one of its modules.
    """
    return logging.getLogger(name)

LEVEL_COLORS = {
    'debug': Fore.CYAN,
    'training': Fore.LIGHTMAGENTA_EX,
    'info': Fore.BLUE,
    'gesture': Fore.LIGHTYELLOW_EX,
    'warning': Fore.YELLOW,
    'error': Fore.RED,
    'critical': Fore.RED,
}

line_re = re.compile(r'(\[.*?\]\s+)(\[.*?\]\s+)\[(\w+)\](.*)')

def color_log(line: str) -> str:
    """
    Colorize one formatted log line. Raises IOError if @line is not a CHMM log line.
    """
    match = line_re.match(line)
    if not match:
        raise IOError('Log message does not match pattern!')
    time, component, level, message = match.groups()
    color = LEVEL_COLORS.get(level, Fore.RESET)
    return (f'{Fore.GREEN}{time}{Fore.LIGHTBLACK_EX}{component}{color}[{level}]'
            f'{Style.RESET_ALL}{message}')
