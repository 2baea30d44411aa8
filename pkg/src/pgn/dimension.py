"""Closed-form dimension lower bounds for the equality-case vector sets.

The values are formula outputs: lower bounds for Hausdorff and packing
dimension, exact in the quadratic field of the parameters.
"""
from __future__ import annotations

from dataclasses import dataclass

from .constructions import PreconditionError, dual_params, sim_params
from .exactnum import QuadExt
from .exponents import CheckResult, Status
from .template import Template, contraction_rates

__all__ = [
    "DimensionBounds",
    "sim_dimension_bounds",
    "dual_dimension_bounds",
    "crosscheck_rates",
]


@dataclass(frozen=True)
class DimensionBounds:
    kind: str  # "simultaneous" or "dual"
    primary_quantity: QuadExt  # A or D
    packing_pair: tuple[QuadExt, QuadExt]  # (B, C) or (E, F)
    hausdorff_lb: QuadExt
    packing_lb: QuadExt
    # True where the bounds are known to be the actual dimensions
    sharp: bool = False


def sim_dimension_bounds(n: int, t, mu) -> DimensionBounds:
    p = sim_params(n, t, mu)
    t, mu = p.t, p.mu
    if t == 1:
        raise PreconditionError("the A formula divides by 1-t; t=1 excluded", "t<1")
    if t == 0:
        raise PreconditionError("the A formula divides by 2t+(n-1)mu = 0 at t=0", "t>0")
    a_core = 1 + t + (n - 1) * mu
    A = (1 - t) / (2 * t + (n - 1) * mu) / (n + 1) * (
        3 * t + 2 * (n - 1) * mu - n + n * a_core * a_core / (1 - t)
    )
    B = n - (2 - A) * (n + 1) / (n + 1 + 2 * t + (n - 1) * mu)
    C = n - 2 + A * (n + 1) / (n + 1 + (n - 1) * t + n * (n - 1) * mu)
    return DimensionBounds(
        "simultaneous", A, (B, C), n - 2 + A, max(B, C), sharp=(mu == p.mu0),
    )


def dual_dimension_bounds(n: int, s, nu) -> DimensionBounds:
    p = dual_params(n, s, nu)
    s, nu = p.s, p.nu
    if s == -n:
        raise PreconditionError("the D formula degenerates at s=-n", "s>-n")
    if s == 0:
        raise PreconditionError("the D formula divides by 2s+(n-1)nu = 0 at s=0", "s<0")
    D = n - (s - s * s) / (2 * s + (n - 1) * nu)
    E = n - (n - D) * (n + 1) * (s + (n - 1) * nu + 1) / ((1 - s) * (n + 1 + s - nu))
    F = D * (n + 1) / (n + 1 + 2 * s + (n - 1) * nu)
    return DimensionBounds("dual", D, (E, F), D, max(E, F), sharp=(nu == p.nu0))


def _exact_match(a: QuadExt, b: QuadExt) -> CheckResult:
    res = a - b
    return CheckResult(Status.EQUALITY if res == 0 else Status.VIOLATED, res)


def crosscheck_rates(T: Template, bounds: DimensionBounds) -> tuple[CheckResult, CheckResult]:
    """Compare the template's contraction rates with the closed-form bounds.

    Returns (lower rate - hausdorff bound, upper rate - packing bound); both
    residuals are expected to vanish exactly.
    """
    if T.kind != bounds.kind:
        raise ValueError(f"template kind {T.kind!r} does not match bounds kind {bounds.kind!r}")
    lo, hi = contraction_rates(T)
    return _exact_match(lo, bounds.hausdorff_lb), _exact_match(hi, bounds.packing_lb)
