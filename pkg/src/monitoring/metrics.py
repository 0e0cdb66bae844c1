"""
Operation tallies for circulant arithmetic and the discrete log solvers.

Counts are logical: a circ_mul is charged d^2 field multiplications whichever
code path executes it, so the cost model stays transparent.
"""

import threading
from contextlib import contextmanager
from dataclasses import asdict, dataclass
from typing import Dict, Iterator, Optional


@dataclass(frozen=True)
class OpSnapshot:
    field_mults: int = 0
    field_squares: int = 0
    field_adds: int = 0
    group_mults: int = 0
    group_squares: int = 0

    @property
    def group_ops(self) -> int:
        return self.group_mults + self.group_squares

    def __sub__(self, other: 'OpSnapshot') -> 'OpSnapshot':
        return OpSnapshot(**{k: v - getattr(other, k) for k, v in asdict(self).items()})

    def to_dict(self) -> Dict[str, int]:
        return asdict(self)


class OpCounter:
    """Contention-safe, monotone within a scope; reset only at scope boundaries"""

    FIELDS = ('field_mults', 'field_squares', 'field_adds', 'group_mults', 'group_squares')

    def __init__(self):
        self._lock = threading.Lock()
        self._counts = dict.fromkeys(self.FIELDS, 0)

    def add(self, **counts: int) -> None:
        with self._lock:
            for name, amount in counts.items():
                if amount < 0:
                    raise ValueError(f"counter {name} cannot decrease")
                self._counts[name] += amount

    def snapshot(self) -> OpSnapshot:
        with self._lock:
            return OpSnapshot(**self._counts)

    def reset(self) -> None:
        with self._lock:
            self._counts = dict.fromkeys(self.FIELDS, 0)

    @contextmanager
    def scope(self) -> Iterator['OpCounter']:
        """Reset on entry; the block measures from zero"""
        self.reset()
        yield self

    @contextmanager
    def child(self) -> Iterator['OpCounter']:
        """Fresh counter for one measurement; its totals are added here on exit"""
        local = OpCounter()
        try:
            yield local
        finally:
            self.add(**local.snapshot().to_dict())

    def track_metrics(self) -> Dict[str, Dict[str, int]]:
        snap = self.snapshot()
        return {
            'field': {
                'mults': snap.field_mults,
                'squares': snap.field_squares,
                'adds': snap.field_adds,
            },
            'group': {
                'mults': snap.group_mults,
                'squares': snap.group_squares,
                'total': snap.group_ops,
            },
        }


def charge(counter: Optional[OpCounter], **counts: int) -> None:
    if counter is not None:
        counter.add(**counts)
