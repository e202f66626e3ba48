"""Hyperbolic-cross index sets.

The cross for parameters (n, gamma, r1, r2) is the set of pairs (k, j)
with k >= r1, j >= r2 and k * j**gamma <= n.  Range endpoints are
floored after a 1e-12 relative guard so that boundaries that are exact
integers up to rounding stay inside the set on every platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

__all__ = ["HyperbolicCross", "build_cross", "cardinality", "dump_cross", "save_cross"]

_GUARD = 1.0 + 1e-12

CROSS_HEADER_PREFIX = "# cross v1"


def floor_guarded(x: float) -> int:
    """floor(x) after nudging x up by one part in 1e12 (x >= 0)."""
    return math.floor(x * _GUARD)


@dataclass(frozen=True)
class HyperbolicCross:
    n: float
    gamma: float
    r1: int
    r2: int
    indices: tuple[tuple[int, int], ...]

    @cached_property
    def index_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.indices)

    def k_extent(self) -> int:
        """Largest admissible k, i.e. floor-guarded n / r2**gamma."""
        return floor_guarded(self.n / self.r2**self.gamma)

    def j_extent(self) -> int:
        """Largest admissible j, i.e. floor-guarded (n / r1)**(1/gamma)."""
        if self.n < self.r1:
            return 0
        return floor_guarded((self.n / self.r1) ** (1.0 / self.gamma))

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, idx: tuple[int, int]) -> bool:
        return idx in self.index_set


def build_cross(n: float, gamma: float, r1: int, r2: int) -> HyperbolicCross:
    """Enumerate the cross for (n, gamma, r1, r2).

    k runs from r1 to floor(n / r2**gamma) and, for each k, j runs from
    r2 to floor((n / k)**(1/gamma)); both floors use the relative guard.
    The result is empty when n < r1 * r2**gamma.
    """
    if gamma < 1:
        raise ValueError(f"gamma must be >= 1, got {gamma}")
    if r1 < 1 or r2 < 1:
        raise ValueError("r1 and r2 must be >= 1")
    if not n > 0:
        raise ValueError(f"n must be positive, got {n}")
    indices: list[tuple[int, int]] = []
    kmax = floor_guarded(n / r2**gamma)
    inv_gamma = 1.0 / gamma
    for k in range(r1, kmax + 1):
        jmax = floor_guarded((n / k) ** inv_gamma)
        indices.extend((k, j) for j in range(r2, jmax + 1))
    return HyperbolicCross(n=float(n), gamma=float(gamma), r1=r1, r2=r2, indices=tuple(indices))


def cardinality(cross: HyperbolicCross) -> int:
    return len(cross.indices)


def dump_cross(cross: HyperbolicCross) -> str:
    lines = [
        f"{CROSS_HEADER_PREFIX} n={cross.n!r} gamma={cross.gamma!r} r1={cross.r1} r2={cross.r2}"
    ]
    lines.extend(f"{k}\t{j}" for k, j in cross.indices)
    return "\n".join(lines) + "\n"


def save_cross(cross: HyperbolicCross, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(dump_cross(cross))
