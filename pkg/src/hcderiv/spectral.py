"""Sparse bivariate Fourier-Legendre coefficient grids.

A :class:`CoeffGrid` represents a function f on Q = [-1, 1]^2 through
its coefficients c_{k,j} = <f, phi_k phi_j>.  The module provides the
smoothness-class norm, the Parseval L2 norm, synthesis back to point
values, sup-norm estimation on Chebyshev-clustered grids, restriction
to an index set, coefficient-space mixed differentiation, and a
tab-separated text format.

All operations are pure and grids are immutable after construction, so
instances can be shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Iterator, Mapping

import numpy as np

from .legendre import clenshaw_eval, muller_differentiate_iterated, phi_vandermonde

if TYPE_CHECKING:
    from .cross import HyperbolicCross

__all__ = [
    "CoeffGrid",
    "ClassParams",
    "class_norm",
    "parseval_l2_norm",
    "synth_eval",
    "mixed_derivative_coeffs",
    "sup_norm_on_grid",
    "restrict_to_cross",
    "GRID_HEADER",
    "dump_grid",
    "parse_grid",
    "save_grid",
    "load_grid",
]

GRID_HEADER = "# coeffgrid v1"

Index = tuple[int, int]


class CoeffGrid:
    """Immutable sparse grid of Fourier-Legendre coefficients.

    Entries map (k, j) pairs of non-negative integers to finite floats.
    Exact zeros are dropped on construction; iteration and serialization
    are sorted by (k, j), so equal grids produce identical output.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[Index, float] | Iterable[tuple[Index, float]] = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        store: dict[Index, float] = {}
        for (k, j), value in items:
            if k != int(k) or j != int(j):
                raise ValueError(f"indices must be integers, got {(k, j)!r}")
            k, j = int(k), int(j)
            if k < 0 or j < 0:
                raise ValueError(f"indices must be non-negative, got {(k, j)}")
            value = float(value)
            if not math.isfinite(value):
                raise ValueError(f"coefficient at {(k, j)} is not finite: {value!r}")
            if (k, j) in store:
                raise ValueError(f"duplicate index {(k, j)}")
            if value != 0.0:
                store[(k, j)] = value
        self._entries = store

    def items(self) -> list[tuple[Index, float]]:
        """Entries sorted by (k, j)."""
        return sorted(self._entries.items())

    def get(self, k: int, j: int, default: float = 0.0) -> float:
        return self._entries.get((k, j), default)

    def to_dict(self) -> dict[Index, float]:
        return dict(self._entries)

    def support(self) -> frozenset[Index]:
        return frozenset(self._entries)

    def values(self) -> np.ndarray:
        """Coefficient values in (k, j) order."""
        return np.array([v for _, v in self.items()], dtype=float)

    def max_index(self) -> Index | None:
        """Largest k and largest j over the support, or None when empty."""
        if not self._entries:
            return None
        return (
            max(k for k, _ in self._entries),
            max(j for _, j in self._entries),
        )

    def to_dense(self) -> np.ndarray:
        """Dense (kmax+1, jmax+1) array; a 1x1 zero array when empty."""
        mi = self.max_index()
        if mi is None:
            return np.zeros((1, 1))
        dense = np.zeros((mi[0] + 1, mi[1] + 1))
        for (k, j), v in self._entries.items():
            dense[k, j] = v
        return dense

    def scale(self, factor: float) -> "CoeffGrid":
        return CoeffGrid({idx: factor * v for idx, v in self._entries.items()})

    def __add__(self, other: "CoeffGrid") -> "CoeffGrid":
        merged = dict(self._entries)
        for idx, v in other._entries.items():
            merged[idx] = merged.get(idx, 0.0) + v
        return CoeffGrid(merged)

    def __sub__(self, other: "CoeffGrid") -> "CoeffGrid":
        merged = dict(self._entries)
        for idx, v in other._entries.items():
            merged[idx] = merged.get(idx, 0.0) - v
        return CoeffGrid(merged)

    def __mul__(self, factor: float) -> "CoeffGrid":
        return self.scale(float(factor))

    __rmul__ = __mul__

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[Index]:
        return iter(sorted(self._entries))

    def __contains__(self, idx: Index) -> bool:
        return idx in self._entries

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CoeffGrid):
            return NotImplemented
        return self._entries == other._entries

    def __repr__(self) -> str:
        return f"CoeffGrid({len(self._entries)} entries)"


@dataclass(frozen=True)
class ClassParams:
    """Smoothness-class parameters (s, mu) of the coefficient-decay norm."""

    s: float
    mu: float

    def __post_init__(self):
        if not self.s >= 1:
            raise ValueError(f"s must be >= 1, got {self.s}")
        if not self.mu > 0:
            raise ValueError(f"mu must be > 0, got {self.mu}")


def class_norm(c: CoeffGrid, params: ClassParams) -> float:
    """Weighted coefficient norm (sum (max(1,k) max(1,j))^{s mu} |c_kj|^s)^{1/s}.

    The weight underlines each factor separately, so rows and columns
    with a zero index carry the other factor's weight rather than 1.
    """
    if len(c) == 0:
        return 0.0
    s, mu = params.s, params.mu
    total = 0.0
    for (k, j), v in c.items():
        total += (max(1, k) * max(1, j)) ** (s * mu) * abs(v) ** s
    return total ** (1.0 / s)


def parseval_l2_norm(c: CoeffGrid) -> float:
    """L2(Q) norm of the synthesized function, via Parseval."""
    if len(c) == 0:
        return 0.0
    return float(np.sqrt(np.sum(c.values() ** 2)))


def synth_eval(c: CoeffGrid, t: float, tau: float) -> float:
    """Evaluate sum c_{k,j} phi_k(t) phi_j(tau) at a single point.

    Factors the double sum into one Clenshaw sum per occupied row k and
    a final Clenshaw sum over k.
    """
    for x in (t, tau):
        if not -1.0 <= x <= 1.0:
            raise ValueError(f"evaluation point {(t, tau)!r} lies outside the square")
    if len(c) == 0:
        return 0.0
    rows: dict[int, dict[int, float]] = {}
    for (k, j), v in c.items():
        rows.setdefault(k, {})[j] = v
    outer = {k: clenshaw_eval(row, tau) for k, row in rows.items()}
    return clenshaw_eval(outer, t)


def mixed_derivative_coeffs(c: CoeffGrid, r1: int, r2: int) -> CoeffGrid:
    """Coefficient grid of the mixed derivative f^(r1, r2).

    Differentiates r1 times along the k axis (each fixed-j column) and
    r2 times along the j axis (each fixed-k row), both in coefficient
    space; source entries with k < r1 or j < r2 contribute nothing.
    """
    if r1 < 1 or r2 < 1:
        raise ValueError("derivative orders r1, r2 must be >= 1")
    return CoeffGrid(_axis_pass(_axis_pass(c.to_dict(), 0, r1), 1, r2))


def _axis_pass(entries: dict[Index, float], axis: int, times: int) -> dict[Index, float]:
    groups: dict[int, dict[int, float]] = {}
    for (k, j), v in entries.items():
        fixed, moving = (j, k) if axis == 0 else (k, j)
        groups.setdefault(fixed, {})[moving] = v
    out: dict[Index, float] = {}
    for fixed in sorted(groups):
        for moving, v in muller_differentiate_iterated(groups[fixed], times).items():
            out[(moving, fixed) if axis == 0 else (fixed, moving)] = v
    return out


def sup_norm_on_grid(c: CoeffGrid, resolution: int = 257) -> float:
    """Max of |synthesized function| over a Chebyshev-clustered tensor grid.

    Sample points are cos(pi i / (resolution - 1)), i = 0..resolution-1,
    which always include the endpoints +-1 where Legendre polynomials
    peak.
    """
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    mi = c.max_index()
    if mi is None:
        return 0.0
    pts = np.cos(np.pi * np.arange(resolution) / (resolution - 1))
    vt = phi_vandermonde(mi[0], pts)
    vu = phi_vandermonde(mi[1], pts)
    return float(np.max(np.abs(vt @ c.to_dense() @ vu.T)))


def restrict_to_cross(c: CoeffGrid, cross: "HyperbolicCross") -> CoeffGrid:
    """Keep exactly the entries whose index pair lies in the cross."""
    members = cross.index_set
    return CoeffGrid({idx: v for idx, v in c.items() if idx in members})


def dump_grid(c: CoeffGrid) -> str:
    """Serialize to the one-entry-per-line text format."""
    lines = [GRID_HEADER]
    for (k, j), v in c.items():
        lines.append(f"{k}\t{j}\t{v!r}")
    return "\n".join(lines) + "\n"


def parse_grid(text: str) -> CoeffGrid:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    # tolerate decoration comments (e.g. a manifest reference) above the header
    while lines and lines[0].startswith("#") and lines[0].strip() != GRID_HEADER:
        lines.pop(0)
    if not lines or lines[0].strip() != GRID_HEADER:
        raise ValueError(f"missing grid header {GRID_HEADER!r}")
    entries = []
    for ln in lines[1:]:
        parts = ln.split("\t")
        if len(parts) != 3:
            raise ValueError(f"malformed grid line {ln!r}")
        entries.append(((int(parts[0]), int(parts[1])), float(parts[2])))
    return CoeffGrid(entries)


def save_grid(c: CoeffGrid, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(dump_grid(c))


def load_grid(path) -> CoeffGrid:
    with open(path, "r", encoding="ascii") as fh:
        return parse_grid(fh.read())
