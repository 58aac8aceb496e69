"""Resource limits and deterministic work counters."""

from __future__ import annotations

import contextlib
import contextvars
import time
from dataclasses import dataclass, field


class ResourceLimitExceeded(RuntimeError):
    pass


@dataclass
class Budget:
    max_degree: int = 80
    max_terms: int = 200_000
    max_seconds: float | None = 1800.0
    started: float = field(default_factory=time.monotonic)
    counters: dict = field(default_factory=lambda: {"groebner_calls": 0, "spairs": 0, "reductions": 0})

    def check_time(self):
        if self.max_seconds is not None and time.monotonic() - self.started > self.max_seconds:
            raise ResourceLimitExceeded(f"time budget of {self.max_seconds}s exceeded")

    def check_poly(self, nterms, degree):
        if nterms > self.max_terms:
            raise ResourceLimitExceeded(f"polynomial with {nterms} terms exceeds --max-terms {self.max_terms}")
        if degree > self.max_degree:
            raise ResourceLimitExceeded(f"degree {degree} exceeds --max-degree {self.max_degree}")


_current = contextvars.ContextVar("flatcone_budget", default=None)


def current():
    b = _current.get()
    if b is None:
        b = Budget(max_seconds=None)
        _current.set(b)
    return b


@contextlib.contextmanager
def limits(**kwargs):
    budget = Budget(**kwargs)
    token = _current.set(budget)
    try:
        yield budget
    finally:
        _current.reset(token)
