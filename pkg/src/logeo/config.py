"""Size guards. ``LOGEO_GUARDS`` overrides the defaults, e.g.
``LOGEO_GUARDS="points=65536,carrier=32"``."""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

from .errors import GuardError, LogeoError

DEFAULT_POINTS = 2**24
DEFAULT_CARRIER = 64


@dataclass(frozen=True)
class Guards:
    points: int = DEFAULT_POINTS
    carrier: int = DEFAULT_CARRIER

    def __post_init__(self):
        if self.points <= 0 or self.carrier <= 0:
            raise LogeoError("guards must be positive")

    def check_points(self, carrier: int, nvars: int) -> int:
        n = carrier**nvars
        if n > self.points:
            raise GuardError(f"point space {carrier}^{nvars} = {n} exceeds guard {self.points}")
        return n

    def check_carrier(self, carrier: int) -> None:
        if carrier > self.carrier:
            raise GuardError(f"carrier size {carrier} exceeds guard {self.carrier}")


def guards_from_env(environ=None) -> Guards:
    environ = os.environ if environ is None else environ
    spec = environ.get("LOGEO_GUARDS", "").strip()
    g = Guards()
    if not spec:
        return g
    for item in spec.split(","):
        key, _, val = item.partition("=")
        key = key.strip()
        if key not in ("points", "carrier"):
            raise LogeoError(f"unknown guard {key!r} in LOGEO_GUARDS")
        g = replace(g, **{key: int(val)})
    return g


_current = guards_from_env()


def get_guards() -> Guards:
    return _current


def set_guards(guards: Guards) -> Guards:
    """Install ``guards`` process-wide; returns the previous value."""
    global _current
    prev, _current = _current, guards
    return prev
