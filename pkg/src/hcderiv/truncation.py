"""The hyperbolic-cross truncation differentiator and its parameter rules.

``apply_method`` keeps the perturbed coefficients inside a hyperbolic
cross and differentiates the finite sum in coefficient space; the cross
size n is the regularization parameter.  ``select_parameters`` maps a
noise level delta to (n, gamma) so that the truncation and
noise-propagation error components balance.  All order relations fix
only powers, so every constant factor is set to 1 and ln(1/delta) is
clamped below by 1.

The admissible gamma range splits into open intervals where the error
carries a clean power of n and isolated exceptional points where an
extra logarithm appears; ``gamma_intervals`` lists both, tagged with
the extra log exponent.  The default selection takes the midpoint of
the leftmost clean interval and therefore never lands on an exceptional
point; when the caller forces an exceptional gamma explicitly, n picks
up the matching logarithmic correction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .cross import build_cross
from .spectral import ClassParams, CoeffGrid, mixed_derivative_coeffs, restrict_to_cross

__all__ = [
    "METRIC_L2",
    "METRIC_C",
    "AdmissibilityError",
    "MethodParams",
    "SelectionInput",
    "GammaRegion",
    "ParameterSelection",
    "apply_method",
    "gamma_intervals",
    "select_parameters",
    "theoretical_error_exponent",
]

METRIC_L2 = "l2"
METRIC_C = "c"
_METRICS = (METRIC_L2, METRIC_C)


class AdmissibilityError(ValueError):
    """The smoothness mu is too small for the requested orders and metric."""


@dataclass(frozen=True)
class MethodParams:
    """Cross parameters of one differentiator run."""

    n: float
    gamma: float
    r1: int
    r2: int

    def __post_init__(self):
        if not self.r1 >= self.r2 >= 1:
            raise ValueError(f"orders must satisfy r1 >= r2 >= 1, got ({self.r1}, {self.r2})")
        if self.gamma < 1:
            raise ValueError(f"gamma must be >= 1, got {self.gamma}")
        if not self.n > 0:
            raise ValueError(f"n must be positive, got {self.n}")


@dataclass(frozen=True)
class SelectionInput:
    """Everything the delta -> (n, gamma) rule depends on."""

    delta: float
    p: float
    cls: ClassParams
    r1: int
    r2: int
    metric: str

    def __post_init__(self):
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if not self.p >= 1:
            raise ValueError(f"p must be >= 1, got {self.p}")
        if not self.r1 >= self.r2 >= 1:
            raise ValueError(f"orders must satisfy r1 >= r2 >= 1, got ({self.r1}, {self.r2})")
        if self.metric not in _METRICS:
            raise ValueError(f"metric must be one of {_METRICS}, got {self.metric!r}")

    def admissibility_bound(self) -> float:
        extra = 0.5 if self.metric == METRIC_L2 else 1.5
        return 2 * self.r1 + extra - 1.0 / self.cls.s

    def check_admissible(self) -> None:
        bound = self.admissibility_bound()
        if not self.cls.mu > bound:
            extra = "1/2" if self.metric == METRIC_L2 else "3/2"
            raise AdmissibilityError(
                f"smoothness violated for metric {self.metric}: "
                f"need mu > 2*r1 + {extra} - 1/s = {bound:.6g}, got mu = {self.cls.mu:.6g}"
            )


@dataclass(frozen=True)
class GammaRegion:
    """A gamma interval or exceptional point with its extra log exponent.

    A region with lo == hi is an isolated point.  log_exponent is the
    power of ln n multiplying the clean error rate on this region; 0
    marks a clean interval.
    """

    lo: float
    hi: float
    lo_open: bool
    hi_open: bool
    log_exponent: float

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, gamma: float, rel_tol: float = 1e-9) -> bool:
        if self.is_point:
            return math.isclose(gamma, self.lo, rel_tol=rel_tol)
        above = gamma > self.lo if self.lo_open else gamma >= self.lo
        below = gamma < self.hi if self.hi_open else gamma <= self.hi
        return above and below


@dataclass(frozen=True)
class ParameterSelection:
    n: float
    gamma: float
    case_label: str


def _point(g: float, log_exponent: float) -> GammaRegion:
    return GammaRegion(g, g, False, False, log_exponent)


def _interval(lo: float, hi: float, lo_open: bool, log_exponent: float = 0.0) -> GammaRegion:
    return GammaRegion(lo, hi, lo_open, True, log_exponent)


def gamma_intervals(si: SelectionInput) -> list[GammaRegion]:
    """Admissible gamma regions for (metric, r1, r2), ordered from 1 upward.

    For equal orders only gamma = 1 is covered and the rate carries the
    main log factor.  For distinct orders the regions tile [1, top] with
    clean open intervals separated by exceptional points.
    """
    si.check_admissible()
    s = si.cls.s
    mu = si.cls.mu
    a = mu - 2 * si.r1 + 1.0 / s
    b = mu - 2 * si.r2 + 1.0 / s
    if si.metric == METRIC_L2:
        if si.r1 == si.r2:
            return [_point(1.0, 1.5 - 1.0 / s)]
        g1 = (b - 0.5) / (a + 0.5)
        g2 = (b + 0.5) / (a + 0.5)
        g3 = (b - 0.5) / (a - 0.5)
        return [
            _interval(1.0, g1, lo_open=False),
            _point(g1, 0.5),
            _interval(g1, g2, lo_open=True),
            _point(g2, 1.0 - 1.0 / s),
            _interval(g2, g3, lo_open=True),
            _point(g3, 0.5),
        ]
    if si.r1 == si.r2:
        return [_point(1.0, 2.0 - 1.0 / s)]
    if si.r1 == si.r2 + 1:
        e1 = (a + 2.5) / (a + 0.5)
        e2 = (a + 0.5) / (a - 1.5)
        return [
            _point(1.0, 1.0),
            _interval(1.0, e1, lo_open=True),
            _point(e1, 1.0 - 1.0 / s),
            _interval(e1, e2, lo_open=True),
            _point(e2, 1.0),
        ]
    h1 = (b - 1.5) / (a + 0.5)
    h2 = (b + 0.5) / (a + 0.5)
    h3 = (b - 1.5) / (a - 1.5)
    return [
        _interval(1.0, h1, lo_open=False),
        _point(h1, 1.0),
        _interval(h1, h2, lo_open=True),
        _point(h2, 1.0 - 1.0 / s),
        _interval(h2, h3, lo_open=True),
        _point(h3, 1.0),
    ]


def _clamped_log(delta: float) -> float:
    return max(math.log(1.0 / delta), 1.0)


def _n_from_delta(delta: float, q: float, log_exponent: float) -> float:
    return (delta / _clamped_log(delta) ** log_exponent) ** (-1.0 / q)


def select_parameters(si: SelectionInput, forced_gamma: float | None = None) -> ParameterSelection:
    """Choose (n, gamma) from the noise level.

    Without a forced gamma: equal orders use gamma = 1 with the
    log-corrected n; distinct orders use n = delta^(-1/(mu - 1/p + 1/s))
    and the midpoint of the leftmost clean gamma interval.  A forced
    gamma keeps the caller's value and, when it sits on an exceptional
    point, applies that point's logarithmic n correction.
    """
    si.check_admissible()
    q = si.cls.mu - _inv(si.p) + 1.0 / si.cls.s
    equal = si.r1 == si.r2
    if equal:
        base_label = "equal-orders"
    elif si.metric == METRIC_L2:
        base_label = "l2-unequal-orders"
    elif si.r1 == si.r2 + 1:
        base_label = "c-adjacent-orders"
    else:
        base_label = "c-separated-orders"

    if forced_gamma is None:
        if equal:
            n = _n_from_delta(si.delta, q, _inv(si.p) - 1.0 / si.cls.s)
            return ParameterSelection(n=n, gamma=1.0, case_label=base_label)
        regions = gamma_intervals(si)
        clean = next(r for r in regions if not r.is_point and r.log_exponent == 0.0)
        gamma = 0.5 * (clean.lo + clean.hi)
        n = _n_from_delta(si.delta, q, 0.0)
        return ParameterSelection(n=n, gamma=gamma, case_label=base_label)

    if forced_gamma < 1:
        raise ValueError(f"gamma must be >= 1, got {forced_gamma}")
    if equal:
        n = _n_from_delta(si.delta, q, _inv(si.p) - 1.0 / si.cls.s)
        return ParameterSelection(n=n, gamma=float(forced_gamma), case_label=base_label + "-forced")
    regions = gamma_intervals(si)
    hit = next((r for r in regions if r.contains(forced_gamma)), None)
    if hit is not None and hit.is_point and hit.log_exponent != 0.0:
        n = _n_from_delta(si.delta, q, hit.log_exponent)
        return ParameterSelection(
            n=n, gamma=float(forced_gamma), case_label=base_label + "-exceptional"
        )
    n = _n_from_delta(si.delta, q, 0.0)
    return ParameterSelection(n=n, gamma=float(forced_gamma), case_label=base_label + "-forced")


def _inv(p: float) -> float:
    return 0.0 if math.isinf(p) else 1.0 / p


def theoretical_error_exponent(si: SelectionInput) -> float:
    """Power of delta in the error bound under the default selection."""
    si.check_admissible()
    q = si.cls.mu - _inv(si.p) + 1.0 / si.cls.s
    extra = 0.5 if si.metric == METRIC_L2 else 1.5
    return (si.cls.mu - 2 * si.r1 + 1.0 / si.cls.s - extra) / q


def apply_method(c_delta: CoeffGrid, params: MethodParams) -> CoeffGrid:
    """Differentiate the cross-restricted coefficients.

    Returns the coefficient grid of the regularized mixed derivative:
    restrict c_delta to the cross for (n, gamma, r1, r2), then apply the
    coefficient-space derivative of order (r1, r2).
    """
    cross = build_cross(params.n, params.gamma, params.r1, params.r2)
    return mixed_derivative_coeffs(restrict_to_cross(c_delta, cross), params.r1, params.r2)
