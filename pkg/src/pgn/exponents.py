"""Transference from template limits to classical exponents, and checkers for
every inequality and equality surface relating them.

Every checker returns a signed residual oriented so that a non-negative
residual means the inequality holds.  Infinite cases are resolved by explicit
case analysis; combinations with no limit raise IndeterminateFormError.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .constructions import rho, tau
from .exactnum import (
    INF,
    ExtReal,
    IndeterminateFormError,
    Infinity,
    QuadExt,
    as_quad,
    is_finite,
    qx_sign,
)
from .template import PhiLimits, Template, intermediate_exponent, phi_limits

__all__ = [
    "Status",
    "CheckResult",
    "ClassicalExponents",
    "SurfacePoint",
    "to_classical",
    "from_classical",
    "classical_from_template",
    "check_ge",
    "check_BL1",
    "check_BL2",
    "bl1_rhs",
    "bl2_rhs",
    "check_SS1",
    "check_SS2",
    "check_khintchine",
    "check_splitting",
    "splitting_forced",
    "equality_surface_BL1",
    "equality_surface_BL2",
    "check_chain",
]

ONE = QuadExt(1)
ZERO = QuadExt(0)


class Status(str, enum.Enum):
    STRICT = "StrictInequality"
    EQUALITY = "Equality"
    VIOLATED = "Violated"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class CheckResult:
    status: Status
    residual: ExtReal

    @property
    def holds(self) -> bool:
        return self.status is not Status.VIOLATED


def check_ge(lhs: ExtReal, rhs: ExtReal) -> CheckResult:
    """Test lhs >= rhs exactly; residual lhs - rhs (0 when both are the same infinity)."""
    if isinstance(lhs, Infinity) or isinstance(rhs, Infinity):
        if lhs == rhs:
            return CheckResult(Status.EQUALITY, ZERO)
        residual = lhs - rhs if isinstance(lhs, Infinity) else -rhs
        status = Status.STRICT if residual > 0 else Status.VIOLATED
        return CheckResult(status, residual)
    residual = lhs - rhs
    s = qx_sign(residual)
    status = Status.STRICT if s > 0 else Status.EQUALITY if s == 0 else Status.VIOLATED
    return CheckResult(status, residual)


def _inv(x: ExtReal) -> QuadExt:
    # 1/inf = 0, used for the splitting bounds
    if isinstance(x, Infinity):
        return ZERO
    return ONE / x


@dataclass(frozen=True)
class ClassicalExponents:
    omega: ExtReal
    omega_hat: ExtReal
    omega_star: ExtReal
    omega_hat_star: ExtReal
    intermediate: Optional[tuple[ExtReal, ...]] = None

    def as_tuple(self) -> tuple[ExtReal, ExtReal, ExtReal, ExtReal]:
        return self.omega, self.omega_hat, self.omega_star, self.omega_hat_star


def _from_slope(num: int, den: QuadExt) -> ExtReal:
    # (1 + w) * den = num, with w = inf when den = 0
    if den == 0:
        return INF
    return QuadExt(num) / den - 1


def to_classical(limits: PhiLimits, n: int) -> ClassicalExponents:
    lo, up = limits.lower, limits.upper
    return ClassicalExponents(
        omega=_from_slope(n + 1, n + lo[0]),
        omega_hat=_from_slope(n + 1, n + up[0]),
        omega_star=_from_slope(n + 1, 1 - up[n]),
        omega_hat_star=_from_slope(n + 1, 1 - lo[n]),
    )


def from_classical(e: ClassicalExponents, n: int) -> dict[str, QuadExt]:
    """Inverse transference: the four corner limits determined by e."""

    def low(w: ExtReal) -> QuadExt:
        return QuadExt(-n) if isinstance(w, Infinity) else QuadExt(n + 1) / (1 + w) - n

    def high(w: ExtReal) -> QuadExt:
        return ONE if isinstance(w, Infinity) else 1 - QuadExt(n + 1) / (1 + w)

    return {
        "lower_1": low(e.omega),
        "upper_1": low(e.omega_hat),
        "upper_last": high(e.omega_star),
        "lower_last": high(e.omega_hat_star),
    }


def classical_from_template(T: Template) -> ClassicalExponents:
    """Classical exponents of T, with the intermediate exponents attached."""
    e = to_classical(phi_limits(T), T.n)
    inter = tuple(intermediate_exponent(T, d) for d in range(T.n))
    return ClassicalExponents(*e.as_tuple(), intermediate=inter)


# Bugeaud-Laurent ------------------------------------------------------


def bl1_rhs(n: int, w_hat_star: ExtReal, w_star: ExtReal) -> ExtReal:
    """(w^* - 1) w* / (((n-2) w^* + 1) w* + (n-1) w^*)."""
    fs, fh = is_finite(w_star), is_finite(w_hat_star)
    if fs and fh:
        return (w_hat_star - 1) * w_star / (((n - 2) * w_hat_star + 1) * w_star + (n - 1) * w_hat_star)
    if not fs and fh:
        # divide through by w*
        return (w_hat_star - 1) / ((n - 2) * w_hat_star + 1)
    if fs and not fh:
        return w_star / ((n - 2) * w_star + n - 1)
    # both infinite: leading terms w^* w* / ((n-2) w^* w*)
    return INF if n == 2 else ONE / (n - 2)


def bl2_rhs(n: int, w: ExtReal, w_hat: ExtReal) -> ExtReal:
    """((n-1) w + w^ + n - 2) / (1 - w^); +inf at w^ = 1 or w = inf."""
    if isinstance(w_hat, Infinity):
        raise IndeterminateFormError("uniform exponent w^ is infinite")
    if w_hat == 1:
        return INF
    if isinstance(w, Infinity):
        return INF if w_hat < 1 else -INF
    return ((n - 1) * w + w_hat + n - 2) / (1 - w_hat)


def check_BL1(e: ClassicalExponents, n: int) -> CheckResult:
    return check_ge(e.omega, bl1_rhs(n, e.omega_hat_star, e.omega_star))


def check_BL2(e: ClassicalExponents, n: int) -> CheckResult:
    return check_ge(e.omega_star, bl2_rhs(n, e.omega, e.omega_hat))


def check_SS1(limits: PhiLimits, n: int) -> CheckResult:
    """n psi_1 + Psi_{n+1} <= -psi_{n+1} ((n+1)/(n-1) + psi_1 + 2 Psi_{n+1}/(n-1))."""
    l1, ln1, un1 = limits.lower[0], limits.lower[n], limits.upper[n]
    lhs = n * l1 + un1
    rhs = -ln1 * (QuadExt(n + 1) / (n - 1) + l1 + 2 * un1 / (n - 1))
    return check_ge(rhs, lhs)


def check_SS2(limits: PhiLimits, n: int) -> CheckResult:
    """n Psi_{n+1} + psi_1 >= -Psi_1 ((n+1)/(n-1) + Psi_{n+1} + 2 psi_1/(n-1))."""
    l1, u1, un1 = limits.lower[0], limits.upper[0], limits.upper[n]
    lhs = n * un1 + l1
    rhs = -u1 * (QuadExt(n + 1) / (n - 1) + un1 + 2 * l1 / (n - 1))
    return check_ge(lhs, rhs)


# Khintchine and splitting ---------------------------------------------


def check_khintchine(e: ClassicalExponents, n: int) -> tuple[CheckResult, CheckResult]:
    """(w* >= n w + n - 1, w >= w*/((n-1) w* + n))."""
    w, ws = e.omega, e.omega_star
    left_rhs = INF if isinstance(w, Infinity) else n * w + n - 1
    right_rhs = ONE / (n - 1) if isinstance(ws, Infinity) else ws / ((n - 1) * ws + n)
    return check_ge(ws, left_rhs), check_ge(w, right_rhs)


def check_splitting(
    e: ClassicalExponents, n: int
) -> tuple[tuple[CheckResult, CheckResult], tuple[CheckResult, CheckResult]]:
    """The two chains that split the Bugeaud-Laurent inequalities.

    First pair: (1 + 1/w*)/(1 + 1/w) >= w^ >= (1 - 1/w^*)/(n-1).
    Second pair: (1 + w*)/(1 + w) >= w^* >= (n-1)/(1 - w^).
    Each pair is returned as (upper check, lower check).
    """
    w, wh, ws, whs = e.as_tuple()
    up1 = (1 + _inv(ws)) / (1 + _inv(w))
    lo1 = (1 - _inv(whs)) / (n - 1)
    first = (check_ge(up1, wh), check_ge(wh, lo1))

    if isinstance(w, Infinity) and isinstance(ws, Infinity):
        raise IndeterminateFormError("(1 + w*)/(1 + w) with w = w* = inf")
    if isinstance(ws, Infinity):
        up2: ExtReal = INF
    elif isinstance(w, Infinity):
        up2 = ZERO
    else:
        up2 = (1 + ws) / (1 + w)
    if isinstance(wh, Infinity):
        raise IndeterminateFormError("uniform exponent w^ is infinite")
    lo2 = INF if wh == 1 else (n - 1) / (1 - wh)
    second = (check_ge(up2, whs), check_ge(whs, lo2))
    return first, second


def splitting_forced(e: ClassicalExponents, n: int) -> list[str]:
    """Consequence check: equality in BL1 (BL2) forces equality in both
    inequalities of the first (second) splitting pair.  Returns the list of
    failures, empty when consistent."""
    issues = []
    first, second = check_splitting(e, n)
    if check_BL1(e, n).status is Status.EQUALITY:
        for name, res in zip(("upper", "lower"), first):
            if res.status is not Status.EQUALITY:
                issues.append(f"BL1 equality but first-pair {name} is {res.status}")
    if check_BL2(e, n).status is Status.EQUALITY:
        for name, res in zip(("upper", "lower"), second):
            if res.status is not Status.EQUALITY:
                issues.append(f"BL2 equality but second-pair {name} is {res.status}")
    return issues


# equality surfaces ----------------------------------------------------


@dataclass(frozen=True)
class SurfacePoint:
    first: Optional[ExtReal]
    second: Optional[ExtReal]
    member: bool
    note: str = ""

    def __iter__(self):
        return iter((self.first, self.second, self.member))


def _in_closed(x: ExtReal, lo: ExtReal, hi: ExtReal) -> bool:
    return lo <= x <= hi


def equality_surface_BL1(n: int, w_star: ExtReal, w: ExtReal) -> SurfacePoint:
    """Membership of (w*, w) in the first equality surface; returns
    (w^*, w^, member) with w^* from the surface and w^ from the first split."""
    w_star = w_star if isinstance(w_star, Infinity) else as_quad(w_star)
    w = w if isinstance(w, Infinity) else as_quad(w)
    if not w_star >= n:
        return SurfacePoint(None, None, False, "w* below n")
    lo, hi = rho(n, w_star)
    if not _in_closed(w, lo, hi):
        return SurfacePoint(None, None, False, "w outside [rho1, rho2]")
    note = ""
    if is_finite(w_star) and is_finite(w):
        den = w_star - (n - 2) * w * w_star - (n - 1) * w
        w_hat_star: ExtReal = INF if den == 0 else w_star * (w + 1) / den
    elif is_finite(w):
        # w* = inf: divide numerator and denominator by w*
        den = 1 - (n - 2) * w
        w_hat_star = INF if den == 0 else (w + 1) / den
    else:
        # only reachable for n = 2 with w = w* = inf
        w_hat_star = INF
        note = "limit along the surface as w, w* -> inf"
    w_hat = (1 + _inv(w_star)) / (1 + _inv(w))
    return SurfacePoint(w_hat_star, w_hat, True, note)


def equality_surface_BL2(n: int, w: ExtReal, w_star: ExtReal) -> SurfacePoint:
    """Membership of (w, w*) in the second equality surface; returns
    (w^, w^*, member)."""
    w = w if isinstance(w, Infinity) else as_quad(w)
    w_star = w_star if isinstance(w_star, Infinity) else as_quad(w_star)
    if not w >= QuadExt(1) / n:
        return SurfacePoint(None, None, False, "w below 1/n")
    lo, hi = tau(n, w)
    if not _in_closed(w_star, lo, hi):
        return SurfacePoint(None, None, False, "w* outside [tau1, tau2]")
    if isinstance(w, Infinity):
        # w* = inf as well; the surface gives w^ -> 1 in the limit
        return SurfacePoint(ONE, INF, True, "limit convention: w^ -> 1 as w -> inf")
    w_hat = (w_star - (n - 1) * w - n + 2) / (1 + w_star)
    w_hat_star = (1 + w_star) / (1 + w)
    return SurfacePoint(w_hat, w_hat_star, True)


# identity chains ------------------------------------------------------


def check_chain(e: ClassicalExponents, n: int) -> dict[str, CheckResult]:
    """Intermediate-exponent relations; each is an inequality LHS >= RHS in
    general and an identity on the corresponding equality surface.

    Keys: ``vi`` (w_1 against w, w^), ``up_d`` (w_{d+1} from w_d, 1 <= d <= n-2),
    ``down_d`` (w_{d-1} from w_d, 1 <= d <= n-2) and ``top`` (w_{n-2} against
    w*, w^*).
    """
    if e.intermediate is None:
        raise ValueError("intermediate exponents required")
    om = e.intermediate
    out: dict[str, CheckResult] = {}

    w, wh = e.omega, e.omega_hat
    if isinstance(wh, Infinity):
        raise IndeterminateFormError("uniform exponent w^ is infinite")
    if wh == 1 or isinstance(w, Infinity):
        vi_rhs: ExtReal = INF
    else:
        vi_rhs = (w + wh) / (1 - wh)
    out["vi"] = check_ge(om[1], vi_rhs)

    for d in range(1, n - 1):
        wd = om[d]
        up = INF if isinstance(wd, Infinity) else ((n - d) * wd + 1) / (n - d - 1)
        out[f"up_{d}"] = check_ge(om[d + 1], up)
        down = QuadExt(d) if isinstance(wd, Infinity) else d * wd / (wd + d + 1)
        out[f"down_{d}"] = check_ge(om[d - 1], down)

    ws, whs = e.omega_star, e.omega_hat_star
    if isinstance(whs, Infinity):
        top: ExtReal = INF
    elif isinstance(ws, Infinity):
        top = whs - 1
    else:
        top = (whs - 1) * ws / (ws + whs)
    out["top"] = check_ge(om[n - 2], top)
    return out
