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

    Implements chmm sessions.

    2026-Oct-19  CHMM developers  Created this.
"""

from argparse import Namespace
from typing import Dict

import requests

from chmm.utils import request_or_die

def format_event(event: Dict) -> str:
    if not event:
        return ''
    return f'{event["name"]}@{event["frame"]}'

def print_sessions() -> None:
    res = request_or_die(requests.get, '/sessions', 'Unable to get sessions')
    print(f"{'ID':<6} {'PEER':<22} {'CONNECTED':<20} {'FRAMES':>10} {'EVENTS':>8} "
            f"{'ERRORS':>8}   {'LAST EVENT':<24}")
    for s in sorted(res.json(), key=lambda s: s['id']):
        print(f"{s['id']:<6} {s['peer']:<22} {s['connected_at']:<20} {s['frames']:>10} {s['events']:>8} "
                f"{s['errors']:>8}   {format_event(s['last_event']):<24}")

def print_gestures() -> None:
    res = request_or_die(requests.get, '/gestures', 'Unable to get gestures')
    print(f"{'SESSION':<8} {'FRAME':>10} {'GESTURE':<12} {'SCORE':>10}")
    for g in res.json():
        print(f"{g['session']:<8} {g['frame']:>10} {g['name']:<12} {g['score']:>10.4f}")


def main(args: Namespace) -> None:
    if args.gestures:
        print_gestures()
    else:
        print_sessions()
