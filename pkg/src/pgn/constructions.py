"""Closed-form parameter functions and builders for the equality-case templates.

All builders normalize ``q0 = n + 1`` so that the ``(n+1)`` denominators of
the switch points cancel.  Each builder walks an explicit slope schedule from
the start values and then runs the exact validator on the result.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exactnum import INF, ExtReal, Infinity, QuadExt, as_quad, qx_sqrt
from .template import (
    AUX_LABEL,
    Breakpoint,
    Template,
    normalize_breakpoints,
)

__all__ = [
    "PreconditionError",
    "SimParams",
    "DualParams",
    "g",
    "mu0",
    "nu0",
    "rho",
    "tau",
    "sim_params",
    "dual_params",
    "build_simultaneous",
    "build_simultaneous_extended",
    "build_dual",
    "build_dual_extended",
    "trivial_template",
]

ONE = QuadExt(1)
ZERO = QuadExt(0)


class PreconditionError(ValueError):
    """A parameter lies outside the admissible region; ``bound`` names it."""

    def __init__(self, message: str, bound: str = ""):
        super().__init__(message)
        self.bound = bound


def _check_n(n: int) -> None:
    if not isinstance(n, int) or n < 2:
        raise PreconditionError(f"n must be an integer >= 2, got {n!r}", "n>=2")


def _rational(x, name: str) -> QuadExt:
    x = as_quad(x)
    if not x.is_rational:
        raise PreconditionError(f"{name} must be rational, got {x}", f"{name} rational")
    return x


def g(n: int, x) -> QuadExt:
    """g_n(x) = ((3-2n)x + 1 - 2n + sqrt((1-x)((4n-5)x + 4n^2-4n+1))) / (2(n-1)^2)."""
    _check_n(n)
    x = _rational(x, "x")
    if x < -n or x > 1:
        raise PreconditionError(f"x={x} outside [-n, 1]", "x in [-n,1]")
    rad = (1 - x) * ((4 * n - 5) * x + 4 * n * n - 4 * n + 1)
    return ((3 - 2 * n) * x + 1 - 2 * n + qx_sqrt(rad)) / (2 * (n - 1) ** 2)


def mu0(n: int, t) -> QuadExt:
    return g(n, t)


def nu0(n: int, s) -> QuadExt:
    return g(n, s)


def rho(n: int, x: ExtReal) -> tuple[ExtReal, ExtReal]:
    """Lower and upper end of the omega-range on the first equality surface."""
    _check_n(n)
    if isinstance(x, Infinity):
        if x.sign < 0:
            raise PreconditionError("x must be >= n", "x>=n")
        return QuadExt(1) / (n - 1), (INF if n == 2 else QuadExt(1) / (n - 2))
    x = as_quad(x)
    if x < n:
        raise PreconditionError(f"x={x} below n={n}", "x>=n")
    r1 = x / ((n - 1) * x + n)
    root = qx_sqrt((4 * n - 4) * x + 1)
    num = (2 * n - 4) * x * x + (2 * n - 1 - root) * x - root + 1
    den = 2 * ((n - 2) ** 2 * x * x + (2 * n * n - 6 * n + 3) * x + n * n - 2 * n)
    return r1, num / den


def tau(n: int, x: ExtReal) -> tuple[ExtReal, ExtReal]:
    """Lower and upper end of the omega*-range on the second equality surface."""
    _check_n(n)
    if isinstance(x, Infinity):
        if x.sign < 0:
            raise PreconditionError("x must be >= 1/n", "x>=1/n")
        return INF, INF
    x = as_quad(x)
    if x < Fraction(1, n):
        raise PreconditionError(f"x={x} below 1/n", "x>=1/n")
    t1 = n * x + n - 1
    root = qx_sqrt(x * (x + 4 * n - 4))
    half = QuadExt(Fraction(1, 2))
    t2 = x * x * half + (n - half + root * half) * x + root * half + n - 2
    return t1, t2


# parameter sets -------------------------------------------------------


@dataclass(frozen=True)
class SimParams:
    n: int
    t: QuadExt
    mu: QuadExt
    theta: QuadExt
    sigma: QuadExt
    mu0: QuadExt


@dataclass(frozen=True)
class DualParams:
    n: int
    s: QuadExt
    nu: QuadExt
    vartheta: QuadExt
    gamma: QuadExt
    nu0: QuadExt


def sim_params(n: int, t, mu) -> SimParams:
    _check_n(n)
    t = _rational(t, "t")
    if t < 0 or t > 1:
        raise PreconditionError(f"t={t} outside [0, 1]", "t in [0,1]")
    mu = as_quad(mu)
    m0 = g(n, t)
    if mu < m0:
        raise PreconditionError(f"mu={mu} below mu0={m0}", "below mu0")
    if mu > -t / n:
        raise PreconditionError(f"mu={mu} above -t/n={-t / n}", "above -t/n")
    theta = -(t + (n - 1) * mu)
    sigma = (1 - n) * (t + n * mu) / (n + 1 + 2 * t + (n - 1) * mu)
    return SimParams(n, t, mu, theta, sigma, m0)


def dual_params(n: int, s, nu) -> DualParams:
    _check_n(n)
    s = _rational(s, "s")
    if s < -n or s > 0:
        raise PreconditionError(f"s={s} outside [-n, 0]", "s in [-n,0]")
    nu = as_quad(nu)
    v0 = g(n, s)
    if nu < -s / n:
        raise PreconditionError(f"nu={nu} below -s/n={-s / n}", "below -s/n")
    if nu > v0:
        raise PreconditionError(f"nu={nu} above nu0={v0}", "above nu0")
    vartheta = -(s + (n - 1) * nu)
    den = n + 1 + 2 * s + (n - 1) * nu
    if den == 0:
        # only at s = -n, nu = 1
        raise PreconditionError("construction degenerates at s=-n", "s>-n")
    gamma = (1 - n) * (s + n * nu) / den
    return DualParams(n, s, nu, vartheta, gamma, v0)


# builders -------------------------------------------------------------


def _walk(start: Breakpoint, schedule: Sequence[tuple[QuadExt, Sequence[QuadExt], str]]) -> list[Breakpoint]:
    pts = [start]
    for q_end, slopes, label in schedule:
        prev = pts[-1]
        dq = q_end - prev.q
        pts.append(Breakpoint(q_end, tuple(v + s * dq for v, s in zip(prev.values, slopes)), label))
    return pts


def _rep(x, k: int) -> list[QuadExt]:
    return [as_quad(x)] * k


def _assemble(n, pre, per, kind, params) -> Template:
    if pre[-1].values != per[0].values:
        raise AssertionError("preperiod does not meet the period start")
    pre = normalize_breakpoints(pre)
    per = normalize_breakpoints(per)
    T = Template(n, pre, per, per[-1].q / per[0].q, kind, params)
    T.require_valid()
    return T


def _sim_preperiod(p: SimParams, q0: QuadExt) -> list[Breakpoint]:
    n, t, theta = p.n, p.t, p.theta
    q2 = (1 - theta) * n / (n + 1) * q0
    q1 = (n + t) / QuadExt(n + 1) * q0
    sched = [
        (q2, _rep(Fraction(-1, n), n) + [ONE], "q''"),
        (q1, _rep(Fraction(-2, n - 1), n - 1) + [ONE, ONE], "q'"),
        (q0, _rep(1, n) + [QuadExt(-n)], "q0"),
    ]
    return _walk(Breakpoint(ZERO, (ZERO,) * (n + 1), "0"), sched)


def _sim_start(p: SimParams, q0: QuadExt) -> Breakpoint:
    vals = tuple([p.mu * q0] * (p.n - 1) + [p.theta * q0, p.t * q0])
    return Breakpoint(q0, vals, "q0")


def _sim_check_t(t: QuadExt) -> None:
    if t == 0:
        raise PreconditionError("period collapses at t=0", "t>0")
    if t == 1:
        raise PreconditionError("q'' degenerates to 0 at t=1", "t<1")


def build_simultaneous(n: int, t, mu) -> Template:
    """Template attaining equality in the first Bugeaud-Laurent inequality."""
    p = sim_params(n, t, mu)
    _sim_check_t(p.t)
    t, mu, theta = p.t, p.mu, p.theta
    q0 = QuadExt(n + 1)
    qt1 = (n + 1 + 2 * t + (n - 1) * mu) / (n + 1) * q0
    qt2 = (t - mu + n + 1) / (n + 1) * q0
    qt3 = (1 + t + (n - 1) * mu) * (1 + n + (n - 1) * (t + n * mu)) / ((n + 1) * (1 - t)) * q0
    q1 = (theta - 1) / (t - 1) * q0
    sched = [
        (qt1, _rep(1, n) + [QuadExt(-n)], "q~1"),
        (qt2, _rep(1, n - 1) + [QuadExt(-n), ONE], "q~2"),
        (qt3, _rep(Fraction(-1, n), n) + [ONE], "q~3"),
        (q1, _rep(Fraction(-2, n - 1), n - 1) + [ONE, ONE], "q1"),
    ]
    per = _walk(_sim_start(p, q0), sched)
    params = {"t": t, "mu": mu, "eta": p.sigma}
    return _assemble(n, _sim_preperiod(p, q0), per, "simultaneous", params)


def build_simultaneous_extended(n: int, t, mu, eta) -> Template:
    """Variant whose liminf of P_{n+1}(q)/q is lowered from sigma to eta.

    The pair P_n = P_{n+1} descends together with slope -(n-1)/2 from q~1 to
    an auxiliary point r~ where P_{n+1}(r~)/r~ = eta, then the schedule of the
    basic construction resumes with re-solved q~2, q~3 and q1.
    """
    p = sim_params(n, t, mu)
    _sim_check_t(p.t)
    eta = as_quad(eta)
    if eta < 0 or eta > p.sigma:
        raise PreconditionError(f"eta={eta} outside [0, sigma={p.sigma}]", "eta in [0,sigma]")
    t, mu, theta, sigma = p.t, p.mu, p.theta, p.sigma
    q0 = QuadExt(n + 1)
    half = QuadExt(n - 1) / 2
    qt1 = (n + 1 + 2 * t + (n - 1) * mu) / (n + 1) * q0
    rt = qt1 * (sigma + half) / (eta + half)
    p1_rt = mu * q0 + (rt - q0)
    qt2 = rt + (eta * rt - p1_rt) / (n + 1)
    q1 = rt * (1 - eta) / (1 - t)
    p1_qt2 = mu * q0 + (qt2 - q0)
    qt3 = QuadExt(n) / (n + 1) * (p1_qt2 + qt2 / n + (1 - theta) * q1)
    sched = [
        (qt1, _rep(1, n) + [QuadExt(-n)], "q~1"),
        (rt, _rep(1, n - 1) + [-half, -half], AUX_LABEL),
        (qt2, _rep(1, n - 1) + [QuadExt(-n), ONE], "q~2"),
        (qt3, _rep(Fraction(-1, n), n) + [ONE], "q~3"),
        (q1, _rep(Fraction(-2, n - 1), n - 1) + [ONE, ONE], "q1"),
    ]
    per = _walk(_sim_start(p, q0), sched)
    params = {"t": t, "mu": mu, "eta": eta}
    return _assemble(n, _sim_preperiod(p, q0), per, "simultaneous", params)


def _dual_preperiod(p: DualParams, q0: QuadExt) -> list[Breakpoint]:
    n, s, vt = p.n, p.s, p.vartheta
    qa = (1 - s) / (n + 1) * q0
    qb = (2 - s - vt) / (n + 1) * q0
    sched = [
        (qa, [QuadExt(-n)] + _rep(1, n), "q'"),
        (qb, [ONE, QuadExt(-n)] + _rep(1, n - 1), "q''"),
        (q0, [ONE, ONE] + _rep(Fraction(-2, n - 1), n - 1), "q0"),
    ]
    return _walk(Breakpoint(ZERO, (ZERO,) * (n + 1), "0"), sched)


def _dual_start(p: DualParams, q0: QuadExt) -> Breakpoint:
    vals = tuple([p.s * q0, p.vartheta * q0] + [p.nu * q0] * (p.n - 1))
    return Breakpoint(q0, vals, "q0")


def _dual_check_s(n: int, s: QuadExt) -> None:
    if s == 0:
        raise PreconditionError("period collapses at s=0", "s<0")
    if s == -n:
        raise PreconditionError("construction degenerates at s=-n", "s>-n")


def build_dual(n: int, s, nu) -> Template:
    """Template attaining equality in the second Bugeaud-Laurent inequality."""
    p = dual_params(n, s, nu)
    _dual_check_s(n, p.s)
    s, nu, vt = p.s, p.nu, p.vartheta
    q0 = QuadExt(n + 1)
    q1 = q0 * (s - 1) / (vt - 1)
    qt1 = (n + 1 + 2 * s + (n - 1) * nu) / (n + 1) * q1
    qt2 = (n + 1 + s - nu) / (n + 1) * q1
    qt3 = (1 + s + (n - 1) * nu) * (1 + n + (n - 1) * (s + n * nu)) / ((n + 1) * (1 - s)) * q1
    sched = [
        (qt3, [ONE, ONE] + _rep(Fraction(-2, n - 1), n - 1), "q~3"),
        (qt2, [ONE] + _rep(Fraction(-1, n), n), "q~2"),
        (qt1, [ONE, QuadExt(-n)] + _rep(1, n - 1), "q~1"),
        (q1, [QuadExt(-n), ONE] + _rep(1, n - 1), "q1"),
    ]
    per = _walk(_dual_start(p, q0), sched)
    params = {"s": s, "nu": nu, "eta": p.gamma}
    return _assemble(n, _dual_preperiod(p, q0), per, "dual", params)


def build_dual_extended(n: int, s, nu, eta) -> Template:
    """Variant whose limsup of P_1(q)/q is raised from gamma to eta.

    P_1 and P_2 meet early at r~ with P_1(r~)/r~ = eta and descend together
    with slope -(n-1)/2 until q~1.  Solved with q1 = 1, then rescaled so that
    q0 = n + 1.
    """
    p = dual_params(n, s, nu)
    _dual_check_s(n, p.s)
    eta = as_quad(eta)
    if eta < p.gamma or eta > 0:
        raise PreconditionError(f"eta={eta} outside [gamma={p.gamma}, 0]", "eta in [gamma,0]")
    s, nu, vt, gamma = p.s, p.nu, p.vartheta, p.gamma
    half = QuadExt(n - 1) / 2
    q1 = ONE
    qt1 = (n + 1 + 2 * s + (n - 1) * nu) / (n + 1) * q1
    rt = qt1 * (gamma + half) / (eta + half)
    qt2 = (eta * rt + n * rt + (1 - nu) * q1) / (n + 1)
    q0 = rt * (1 - eta) / (1 - s)
    p2_qt2 = nu * q1 - (q1 - qt2)
    qt3 = QuadExt(n) / (n + 1) * (p2_qt2 + qt2 / n + (1 - vt) * q0)
    c = (n + 1) / q0
    q0, qt3, qt2, rt, qt1, q1 = (x * c for x in (q0, qt3, qt2, rt, qt1, q1))
    sched = [
        (qt3, [ONE, ONE] + _rep(Fraction(-2, n - 1), n - 1), "q~3"),
        (qt2, [ONE] + _rep(Fraction(-1, n), n), "q~2"),
        (rt, [ONE, QuadExt(-n)] + _rep(1, n - 1), AUX_LABEL),
        (qt1, [-half, -half] + _rep(1, n - 1), "q~1"),
        (q1, [QuadExt(-n), ONE] + _rep(1, n - 1), "q1"),
    ]
    per = _walk(_dual_start(p, q0), sched)
    params = {"s": s, "nu": nu, "eta": eta}
    return _assemble(n, _dual_preperiod(p, q0), per, "dual", params)


def trivial_template(n: int) -> Template:
    """All components identically zero (the Dirichlet point)."""
    _check_n(n)
    z = (ZERO,) * (n + 1)
    pre = (Breakpoint(ZERO, z, "0"), Breakpoint(ONE, z, "q0"))
    per = (Breakpoint(ONE, z, "q0"), Breakpoint(QuadExt(2), z, "q1"))
    T = Template(n, pre, per, QuadExt(2), "trivial", {})
    T.require_valid()
    return T
