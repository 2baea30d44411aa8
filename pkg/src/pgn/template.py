"""Self-similar periodic n-templates: data model, validator, limits and rates.

A template is stored as a preperiod on ``[0, q0]``, one period on
``[q0, q1]`` and the scale ratio ``lam = q1 / q0``.  Beyond ``q1`` the period
repeats geometrically: ``P(lam * q) = lam * P(q)`` for ``q >= q0``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .exactnum import (
    INF,
    ExtReal,
    QuadExt,
    as_quad,
    ext_from_json,
    ext_to_json,
    qx_from_json,
    qx_to_json,
)

__all__ = [
    "AUX_LABEL",
    "Breakpoint",
    "Template",
    "Violation",
    "ValidationReport",
    "PhiLimits",
    "ContractionProfile",
    "InvalidTemplateError",
    "normalize_breakpoints",
    "allowed_slopes",
    "validate",
    "evaluate",
    "phi_limits",
    "contraction_profile",
    "contraction_rates",
    "intermediate_exponent",
    "template_to_json",
    "template_from_json",
    "dumps",
    "loads",
]

# label of auxiliary switch points that lose to a named one when merged
AUX_LABEL = "r~"
_ENDPOINT_LABELS = ("q0", "q1")

ZERO = QuadExt(0)


class InvalidTemplateError(ValueError):
    pass


@dataclass(frozen=True)
class Breakpoint:
    q: QuadExt
    values: tuple[QuadExt, ...]
    label: str = ""

    def scaled(self, lam: QuadExt, label: str | None = None) -> Breakpoint:
        return Breakpoint(
            self.q * lam, tuple(v * lam for v in self.values),
            self.label if label is None else label,
        )


def _merge_label(a: str, b: str) -> str:
    if b in _ENDPOINT_LABELS:
        return b
    if a in _ENDPOINT_LABELS:
        return a
    if a and a != AUX_LABEL:
        return a
    return b or a


def normalize_breakpoints(bps: Iterable[Breakpoint]) -> tuple[Breakpoint, ...]:
    """Collapse zero-length segments.

    Coinciding breakpoints must carry identical values; the merged point keeps
    an endpoint label first, then the earlier named label, and the auxiliary
    label only if nothing else is available.
    """
    out: list[Breakpoint] = []
    for bp in bps:
        if out and out[-1].q == bp.q:
            prev = out[-1]
            if prev.values != bp.values:
                raise InvalidTemplateError(f"discontinuity at q={prev.q}")
            out[-1] = Breakpoint(prev.q, prev.values, _merge_label(prev.label, bp.label))
        else:
            out.append(bp)
    return tuple(out)


def allowed_slopes(n: int) -> frozenset[QuadExt]:
    return frozenset([QuadExt(1)] + [QuadExt(-k) / (n + 1 - k) for k in range(n + 1)])


def _slopes(a: Breakpoint, b: Breakpoint) -> tuple[QuadExt, ...]:
    dq = b.q - a.q
    return tuple((vb - va) / dq for va, vb in zip(a.values, b.values))


@dataclass(frozen=True)
class Violation:
    clause: str
    q: QuadExt | None
    message: str

    def __str__(self) -> str:
        where = "" if self.q is None else f" at q={self.q}"
        return f"clause {self.clause}{where}: {self.message}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def clauses(self) -> set[str]:
        return {v.clause for v in self.violations}

    def add(self, clause: str, q, message: str) -> None:
        self.violations.append(Violation(clause, q, message))

    def __str__(self) -> str:
        if self.ok:
            return "valid"
        return "\n".join(str(v) for v in self.violations)


@dataclass(frozen=True)
class Template:
    n: int
    preperiod: tuple[Breakpoint, ...]
    period: tuple[Breakpoint, ...]
    scale_ratio: QuadExt
    kind: str = "custom"
    params: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def q0(self) -> QuadExt:
        return self.period[0].q

    @property
    def q1(self) -> QuadExt:
        return self.period[-1].q

    @property
    def lam(self) -> QuadExt:
        return self.scale_ratio

    @property
    def discriminant(self) -> int:
        for bp in self.preperiod + self.period:
            for x in (bp.q, *bp.values):
                if x.r:
                    return x.r
        for x in self.params.values():
            if isinstance(x, QuadExt) and x.r:
                return x.r
        return 0

    @cached_property
    def report(self) -> ValidationReport:
        return validate(self)

    def require_valid(self) -> None:
        if not self.report.ok:
            raise InvalidTemplateError(str(self.report))

    def period_segments(self) -> Iterator[tuple[Breakpoint, Breakpoint, tuple[QuadExt, ...]]]:
        for a, b in zip(self.period, self.period[1:]):
            yield a, b, _slopes(a, b)

    def labeled(self) -> list[tuple[str, QuadExt]]:
        return [(bp.label, bp.q) for bp in self.period if bp.label]


# validation -----------------------------------------------------------


def validate(T: Template) -> ValidationReport:
    """Check clauses (i)-(iv) of the template definition plus self-similarity."""
    rep = ValidationReport()
    n = T.n
    if n < 2:
        rep.add("structure", None, f"n={n} < 2")
        return rep
    for bp in T.preperiod + T.period:
        if len(bp.values) != n + 1:
            rep.add("structure", bp.q, f"expected {n + 1} components, got {len(bp.values)}")
            return rep
    if not T.preperiod or not T.period or len(T.period) < 2:
        rep.add("structure", None, "preperiod and a period of at least two breakpoints required")
        return rep
    if T.preperiod[0].q != 0:
        rep.add("structure", T.preperiod[0].q, "preperiod must start at q=0")
    pts = list(T.preperiod)
    if T.preperiod[-1].q != T.q0 or T.preperiod[-1].values != T.period[0].values:
        rep.add("structure", T.q0, "preperiod does not end at the period start")
    pts += list(T.period[1:])
    for a, b in zip(pts, pts[1:]):
        if not b.q > a.q:
            rep.add("structure", b.q, "breakpoints not strictly increasing")
            return rep
    if not T.q0 > 0:
        rep.add("structure", T.q0, "q0 must be positive")
        return rep
    if T.scale_ratio != T.q1 / T.q0 or not T.scale_ratio > 1:
        rep.add("self-similarity", T.q1, f"scale ratio {T.scale_ratio} != q1/q0 = {T.q1 / T.q0}")
    elif T.period[-1].values != tuple(v * T.scale_ratio for v in T.period[0].values):
        rep.add("self-similarity", T.q1, "values at q1 are not lam times values at q0")

    for bp in pts:
        if sum(bp.values, ZERO) != 0:
            rep.add("i", bp.q, "components do not sum to zero")
        for j in range(n):
            if bp.values[j] > bp.values[j + 1]:
                rep.add("ii", bp.q, f"P_{j + 1} > P_{j + 2}")

    allowed = allowed_slopes(n)
    segs = [(a, b, _slopes(a, b)) for a, b in zip(pts, pts[1:])]
    for a, _b, sl in segs:
        for j, s in enumerate(sl):
            if s not in allowed:
                rep.add("iii", a.q, f"slope {s} of P_{j + 1} not admissible")

    # partial sums; the first period segment is appended so the junction at
    # q1 (start of the next period) is also checked
    wrap_a, wrap_b, wrap_sl = segs[len(T.preperiod) - 1]
    lam = T.scale_ratio
    segs_wrap = segs + [(wrap_a.scaled(lam), wrap_b.scaled(lam), wrap_sl)]
    for a, b, sl in segs:
        for j in range(1, n + 1):
            gap_open = (a.values[j] - a.values[j - 1] > 0) or (b.values[j] - b.values[j - 1] > 0)
            if not gap_open:
                continue
            f = sum(sl[:j], ZERO)
            if f != j and f != j - 1 - n:
                rep.add("iv", a.q, f"F_{j} slope {f} not in {{{j}, {j - 1 - n}}}")
    for (a, b, sl_left), (_b2, _c, sl_right) in zip(segs_wrap, segs_wrap[1:]):
        for j in range(1, n + 1):
            if not b.values[j] - b.values[j - 1] > 0:
                continue
            if sum(sl_left[:j], ZERO) > sum(sl_right[:j], ZERO):
                rep.add("iv", b.q, f"F_{j} not convex")
    return rep


# evaluation -----------------------------------------------------------


def _interp(bps: Sequence[Breakpoint], q: QuadExt) -> tuple[QuadExt, ...]:
    for a, b in zip(bps, bps[1:]):
        if a.q <= q <= b.q:
            if q == a.q:
                return a.values
            if q == b.q:
                return b.values
            w = (q - a.q) / (b.q - a.q)
            return tuple(va + (vb - va) * w for va, vb in zip(a.values, b.values))
    if len(bps) == 1 and bps[0].q == q:
        return bps[0].values
    raise ValueError(f"q={q} outside breakpoint range")


def evaluate(T: Template, q) -> tuple[QuadExt, ...]:
    """Exact P(q), extending the stored period by geometric scaling."""
    q = as_quad(q)
    if q < 0:
        raise ValueError("q must be non-negative")
    if q <= T.q0:
        return _interp(T.preperiod, q)
    scale = QuadExt(1)
    while q > T.q1 * scale:
        scale = scale * T.scale_ratio
    base = _interp(T.period, q / scale)
    return tuple(v * scale for v in base)


# limits ---------------------------------------------------------------


@dataclass(frozen=True)
class PhiLimits:
    lower: tuple[QuadExt, ...]
    upper: tuple[QuadExt, ...]

    @property
    def n(self) -> int:
        return len(self.lower) - 1

    @classmethod
    def zero(cls, n: int) -> PhiLimits:
        return cls((ZERO,) * (n + 1), (ZERO,) * (n + 1))


def phi_limits(T: Template) -> PhiLimits:
    """liminf and limsup of P_j(q)/q; on each linear piece P_j(q)/q is
    monotone, so scanning the period breakpoints is exact."""
    T.require_valid()
    ratios = [tuple(v / bp.q for v in bp.values) for bp in T.period]
    lower = tuple(min(r[j] for r in ratios) for j in range(T.n + 1))
    upper = tuple(max(r[j] for r in ratios) for j in range(T.n + 1))
    return PhiLimits(lower, upper)


# contraction ----------------------------------------------------------


@dataclass(frozen=True)
class ContractionProfile:
    # (left, right, delta) partitioning [q0, q1]
    pieces: tuple[tuple[QuadExt, QuadExt, int], ...]

    def deltas(self) -> list[int]:
        return [d for _, _, d in self.pieces]


def _delta(slopes: Sequence[QuadExt]) -> int:
    kappa = max((j + 1 for j, s in enumerate(slopes) if s < 1), default=0)
    return kappa - 1


def contraction_profile(T: Template) -> ContractionProfile:
    T.require_valid()
    pieces: list[tuple[QuadExt, QuadExt, int]] = []
    for a, b, sl in T.period_segments():
        d = _delta(sl)
        if pieces and pieces[-1][2] == d:
            pieces[-1] = (pieces[-1][0], b.q, d)
        else:
            pieces.append((a.q, b.q, d))
    return ContractionProfile(tuple(pieces))


def _h_values(T: Template) -> tuple[QuadExt, list[QuadExt]]:
    prof = contraction_profile(T)
    total = sum(((b - a) * d for a, b, d in prof.pieces), ZERO)
    avg = total / (T.q1 - T.q0)
    # h(x) = lim of the running average along x * lam**N
    hs = []
    acc = avg * T.q0
    hs.append(acc / T.q0)
    for a, b, d in prof.pieces:
        acc = acc + (b - a) * d
        hs.append(acc / b)
    return avg, hs


def contraction_rates(T: Template) -> tuple[QuadExt, QuadExt]:
    """(lower, upper) asymptotic average contraction rates.

    The running average over [q0, x lam**N] tends to
    h(x) = (avg * q0 + int_{q0}^x delta) / x; between profile breakpoints h
    moves monotonically towards the constant delta, so extremes sit at
    breakpoints.
    """
    _avg, hs = _h_values(T)
    return min(hs), max(hs)


def period_average_rate(T: Template) -> QuadExt:
    return _h_values(T)[0]


def intermediate_exponent(T: Template, d: int) -> ExtReal:
    """omega_d via 1/(1 + omega_d) = liminf (n - d - sum_{j>=d+2} P_j/q)/(n+1)."""
    n = T.n
    if not 0 <= d <= n - 1:
        raise ValueError(f"d={d} outside [0, {n - 1}]")
    T.require_valid()
    vals = []
    for bp in T.period:
        tail = sum(bp.values[d + 1:], ZERO) / bp.q
        vals.append((n - d - tail) / (n + 1))
    m = min(vals)
    if m == 0:
        return INF
    return QuadExt(1) / m - 1


# serialization --------------------------------------------------------


def _bp_to_json(bp: Breakpoint) -> dict:
    return {"q": qx_to_json(bp.q), "values": [qx_to_json(v) for v in bp.values], "label": bp.label}


def _bp_from_json(obj: dict) -> Breakpoint:
    return Breakpoint(
        qx_from_json(obj["q"]), tuple(qx_from_json(v) for v in obj["values"]),
        obj.get("label", ""),
    )


def template_to_json(T: Template) -> dict:
    return {
        "n": T.n,
        "r": str(T.discriminant),
        "kind": T.kind,
        "params": {k: ext_to_json(v) for k, v in T.params.items()},
        "preperiod": [_bp_to_json(bp) for bp in T.preperiod],
        "period": {"breakpoints": [_bp_to_json(bp) for bp in T.period]},
        "lambda": qx_to_json(T.scale_ratio),
    }


def template_from_json(obj: dict, check: bool = True) -> Template:
    """Rebuild a template; with ``check`` the validator must pass."""
    try:
        period = obj["period"]
        if isinstance(period, dict):
            period = period["breakpoints"]
        T = Template(
            n=int(obj["n"]),
            preperiod=normalize_breakpoints(_bp_from_json(b) for b in obj["preperiod"]),
            period=normalize_breakpoints(_bp_from_json(b) for b in period),
            scale_ratio=qx_from_json(obj["lambda"]),
            kind=obj.get("kind", "custom"),
            params={k: ext_from_json(v) for k, v in obj.get("params", {}).items()},
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed template JSON: {exc}") from exc
    if check:
        T.require_valid()
    return T


def dumps(T: Template) -> str:
    return json.dumps(template_to_json(T), indent=2, ensure_ascii=False) + "\n"


def loads(text: str, check: bool = True) -> Template:
    return template_from_json(json.loads(text), check=check)
