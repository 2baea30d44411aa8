"""Command-line interface: ``pgn construct | verify | sweep | render``.

Exit codes: 0 success, 1 verification failure, 2 precondition violation,
3 I/O or parse error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .constructions import (
    PreconditionError,
    build_dual,
    build_dual_extended,
    build_simultaneous,
    build_simultaneous_extended,
    dual_params,
    mu0,
    nu0,
    sim_params,
    trivial_template,
)
from .dimension import crosscheck_rates, dual_dimension_bounds, sim_dimension_bounds
from .exactnum import ExtReal, QuadExt, ext_to_json, parse_rational, to_decimal_str
from .exponents import (
    Status,
    check_BL1,
    check_BL2,
    check_chain,
    check_ge,
    check_khintchine,
    check_SS1,
    check_SS2,
    check_splitting,
    classical_from_template,
)
from .render import render_svg
from .template import InvalidTemplateError, Template, dumps, loads, phi_limits, validate

EXIT_OK, EXIT_VERIFY, EXIT_PRECONDITION, EXIT_IO = 0, 1, 2, 3


class ParseError(ValueError):
    pass


# parameter parsing ----------------------------------------------------


def _rat(text: str, name: str) -> QuadExt:
    try:
        return QuadExt(parse_rational(text))
    except ValueError as exc:
        raise ParseError(f"malformed rational for {name}: {text!r}") from exc


def resolve_mu(n: int, t: QuadExt, token: str) -> QuadExt:
    """A value for mu: rational, 'mu0', '-t/n' or 'interpolate:k/m'
    (mu0 + (k/m)(-t/n - mu0))."""
    token = token.strip()
    if token == "mu0":
        return mu0(n, t)
    if token == "-t/n":
        return -t / n
    if token.startswith("interpolate:"):
        frac = _rat(token.split(":", 1)[1], "interpolate")
        m = mu0(n, t)
        return m + frac * (-t / n - m)
    return _rat(token, "mu")


def resolve_nu(n: int, s: QuadExt, token: str) -> QuadExt:
    """A value for nu: rational, 'nu0', '-s/n' or 'interpolate:k/m'
    (-s/n + (k/m)(nu0 + s/n))."""
    token = token.strip()
    if token == "nu0":
        return nu0(n, s)
    if token == "-s/n":
        return -s / n
    if token.startswith("interpolate:"):
        frac = _rat(token.split(":", 1)[1], "interpolate")
        return -s / n + frac * (nu0(n, s) + s / n)
    return _rat(token, "nu")


def resolve_eta(edge: QuadExt, token: Optional[str]) -> Optional[QuadExt]:
    """eta as rational, 'sigma'/'gamma' (the plain construction) or
    'frac:k/m' meaning (k/m) times sigma resp. gamma."""
    if token is None:
        return None
    token = token.strip()
    if token in ("sigma", "gamma"):
        return edge
    if token.startswith("frac:"):
        return _rat(token.split(":", 1)[1], "eta fraction") * edge
    return _rat(token, "eta")


def build_exact(kind: str, n: int, x: QuadExt, y: QuadExt, eta: Optional[str]) -> Template:
    if kind == "sim":
        p = sim_params(n, x, y)
        e = resolve_eta(p.sigma, eta)
        if e is None:
            return build_simultaneous(n, x, y)
        return build_simultaneous_extended(n, x, y, e)
    if kind == "dual":
        p = dual_params(n, x, y)
        e = resolve_eta(p.gamma, eta)
        if e is None:
            return build_dual(n, x, y)
        return build_dual_extended(n, x, y, e)
    raise ParseError(f"unknown kind {kind!r}")


def build_from_args(kind: str, n: int, x: Optional[str], y: Optional[str], eta: Optional[str]) -> Template:
    if kind == "trivial":
        return trivial_template(n)
    if x is None or y is None:
        raise ParseError(f"--kind {kind} needs both parameters")
    if kind == "sim":
        t = _rat(x, "t")
        return build_exact(kind, n, t, resolve_mu(n, t, y), eta)
    if kind == "dual":
        s = _rat(x, "s")
        return build_exact(kind, n, s, resolve_nu(n, s, y), eta)
    raise ParseError(f"unknown kind {kind!r}")


# verification ---------------------------------------------------------


@dataclass
class ReportLine:
    name: str
    status: str
    residual: Optional[ExtReal]
    expected: str  # "equality", "inequality" or "info"

    @property
    def failed(self) -> bool:
        if self.expected == "equality":
            return self.status != Status.EQUALITY.value
        if self.expected == "inequality":
            return self.status == Status.VIOLATED.value
        return False

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "residual": None if self.residual is None else ext_to_json(self.residual),
            "expected": self.expected,
            "failed": self.failed,
        }

    def to_text(self) -> str:
        res = "" if self.residual is None else f" residual={self.residual}"
        mark = "  FAIL" if self.failed else ""
        return f"{self.name} = {self.status}{res} (expected {self.expected}){mark}"


def _is_plain(T: Template) -> bool:
    p, n = T.params, T.n
    if T.kind == "simultaneous":
        t, mu = p["t"], p["mu"]
        return p["eta"] == (1 - n) * (t + n * mu) / (n + 1 + 2 * t + (n - 1) * mu)
    if T.kind == "dual":
        s, nu = p["s"], p["nu"]
        return p["eta"] == (1 - n) * (s + n * nu) / (n + 1 + 2 * s + (n - 1) * nu)
    return False


def verify_template(T: Template) -> list[ReportLine]:
    """Run the full battery; each line states what was expected."""
    lines: list[ReportLine] = []
    rep = validate(T)
    if not rep.ok:
        for v in rep.violations:
            lines.append(ReportLine(f"template clause ({v.clause}) at q={v.q}: {v.message}",
                                    Status.VIOLATED.value, None, "equality"))
        return lines
    lines.append(ReportLine("template", "valid", None, "info"))
    n = T.n
    kind = T.kind
    plain = _is_plain(T)
    trivial = kind == "trivial"
    sim = kind == "simultaneous" and plain
    dual = kind == "dual" and plain

    def add(name: str, res, equal: bool) -> None:
        lines.append(ReportLine(name, res.status.value, res.residual, "equality" if equal else "inequality"))

    lim = phi_limits(T)
    for j in range(n + 1):
        lines.append(ReportLine(f"psi_lower_{j + 1}", str(lim.lower[j]), None, "info"))
        lines.append(ReportLine(f"psi_upper_{j + 1}", str(lim.upper[j]), None, "info"))
    e = classical_from_template(T)
    for name, val in zip(("omega", "omega_hat", "omega_star", "omega_hat_star"), e.as_tuple()):
        lines.append(ReportLine(name, str(val), None, "info"))
    for d, val in enumerate(e.intermediate):
        lines.append(ReportLine(f"omega_{d}", str(val), None, "info"))

    add("SS1", check_SS1(lim, n), sim or trivial)
    add("BL1", check_BL1(e, n), sim or trivial)
    add("SS2", check_SS2(lim, n), dual or trivial)
    add("BL2", check_BL2(e, n), dual or trivial)
    kl, kr = check_khintchine(e, n)
    add("khintchine_left", kl, trivial)
    add("khintchine_right", kr, trivial)
    (u1, l1), (u2, l2) = check_splitting(e, n)
    add("split_first_upper", u1, sim or trivial)
    add("split_first_lower", l1, sim or trivial)
    add("split_second_upper", u2, dual or trivial)
    add("split_second_lower", l2, dual or trivial)
    for key, res in check_chain(e, n).items():
        first_family = key == "top" or key.startswith("down")
        add(f"chain_{key}", res, trivial or (sim and first_family) or (dual and not first_family))
    add("omega_0_vs_omega", check_ge(e.intermediate[0], e.omega), True)
    add("omega_last_vs_omega_star", check_ge(e.intermediate[-1], e.omega_star), True)

    if kind in ("simultaneous", "dual"):
        p = T.params
        if kind == "simultaneous":
            b = sim_dimension_bounds(n, p["t"], p["mu"])
            names = ("A", "B", "C")
        else:
            b = dual_dimension_bounds(n, p["s"], p["nu"])
            names = ("D", "E", "F")
        for name, val in zip(names, (b.primary_quantity,) + b.packing_pair):
            lines.append(ReportLine(name, str(val), None, "info"))
        lo, hi = crosscheck_rates(T, b)
        lines.append(ReportLine("lower_rate_vs_hausdorff_lb", lo.status.value, lo.residual,
                                "equality" if plain else "info"))
        lines.append(ReportLine("upper_rate_vs_packing_lb", hi.status.value, hi.residual,
                                "equality" if plain else "info"))
    return lines


# sweep ----------------------------------------------------------------


def _parse_ns(text: str) -> list[int]:
    try:
        if ".." in text:
            a, b = text.split("..")
            return list(range(int(a), int(b) + 1))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ParseError(f"malformed n range {text!r}") from exc


def _grid(kind: str, n: int, values: Optional[str], count: Optional[int]) -> list[QuadExt]:
    if values:
        return [_rat(v, "grid value") for v in values.split(",") if v.strip()]
    if count is None or count < 1:
        raise ParseError("sweep needs --values or a positive --count")
    pts = [QuadExt(Fraction(k, count + 1)) for k in range(1, count + 1)]
    return pts if kind == "sim" else [-n * x for x in pts]


def _cell(x: ExtReal) -> tuple[str, str]:
    return str(x), to_decimal_str(x)


def sweep_point(kind: str, n: int, x: QuadExt, rule: str, eta_rule: Optional[str]) -> dict[str, str]:
    row: dict[str, str] = {"n": str(n), "kind": kind}
    xname, yname = ("t", "mu") if kind == "sim" else ("s", "nu")
    row[xname] = str(x)
    try:
        y = resolve_mu(n, x, rule) if kind == "sim" else resolve_nu(n, x, rule)
        row[yname], row[yname + "_dec"] = _cell(y)
        T = build_exact(kind, n, x, y, eta_rule)
    except PreconditionError as exc:
        row["status"] = "skipped"
        row["reason"] = exc.bound or str(exc)
        return row
    row["status"] = "ok"
    row["reason"] = ""
    row["eta"], row["eta_dec"] = _cell(T.params["eta"])
    lim = phi_limits(T)
    row["psi_lower"] = ";".join(str(v) for v in lim.lower)
    row["psi_lower_dec"] = ";".join(to_decimal_str(v) for v in lim.lower)
    row["psi_upper"] = ";".join(str(v) for v in lim.upper)
    row["psi_upper_dec"] = ";".join(to_decimal_str(v) for v in lim.upper)
    e = classical_from_template(T)
    for name, val in zip(("omega", "omega_hat", "omega_star", "omega_hat_star"), e.as_tuple()):
        row[name], row[name + "_dec"] = _cell(val)
    if kind == "sim":
        b = sim_dimension_bounds(n, T.params["t"], T.params["mu"])
        names = ("A", "B", "C")
    else:
        b = dual_dimension_bounds(n, T.params["s"], T.params["nu"])
        names = ("D", "E", "F")
    for name, val in zip(names, (b.primary_quantity,) + b.packing_pair):
        row[name], row[name + "_dec"] = _cell(val)
    row["hausdorff_lb"], row["hausdorff_lb_dec"] = _cell(b.hausdorff_lb)
    row["packing_lb"], row["packing_lb_dec"] = _cell(b.packing_lb)
    row["SS1"] = check_SS1(lim, n).status.value
    row["BL1"] = check_BL1(e, n).status.value
    row["SS2"] = check_SS2(lim, n).status.value
    row["BL2"] = check_BL2(e, n).status.value
    lo, hi = crosscheck_rates(T, b)
    row["rates"] = "Equality" if lo.residual == 0 and hi.residual == 0 else "Mismatch"
    return row


def _columns(kind: str) -> list[str]:
    x, y = ("t", "mu") if kind == "sim" else ("s", "nu")
    abc = ("A", "B", "C") if kind == "sim" else ("D", "E", "F")
    cols = ["kind", "n", x, y, f"{y}_dec", "status", "reason", "eta", "eta_dec",
            "psi_lower", "psi_lower_dec", "psi_upper", "psi_upper_dec"]
    for name in ("omega", "omega_hat", "omega_star", "omega_hat_star", *abc, "hausdorff_lb", "packing_lb"):
        cols += [name, name + "_dec"]
    return cols + ["SS1", "BL1", "SS2", "BL2", "rates"]


def _star_point(job):
    return sweep_point(*job)


def run_sweep(kind: str, ns: Sequence[int], values: Optional[str], count: Optional[int],
              rule: str, eta_rule: Optional[str], fmt: str, threads: int = 1) -> str:
    jobs = [(kind, n, x, rule, eta_rule) for n in ns for x in _grid(kind, n, values, count)]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_star_point, jobs))
    else:
        rows = [_star_point(j) for j in jobs]
    if fmt == "json":
        return json.dumps(rows, indent=2, ensure_ascii=False) + "\n"
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=_columns(kind), lineterminator="\n", restval="")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


# command handlers -----------------------------------------------------


def _template_source(args) -> Template:
    if getattr(args, "template", None):
        try:
            if args.template == "-":
                text = sys.stdin.read()
            else:
                with open(args.template, encoding="utf-8") as fh:
                    text = fh.read()
        except OSError as exc:
            raise ParseError(f"cannot read {args.template}: {exc}") from exc
        try:
            return loads(text, check=False)
        except (ValueError, InvalidTemplateError) as exc:
            raise ParseError(f"cannot parse template: {exc}") from exc
    if not args.kind:
        raise ParseError("give a template file or --kind with parameters")
    x = args.t if args.kind == "sim" else args.s
    y = args.mu if args.kind == "sim" else args.nu
    return build_from_args(args.kind, args.n, x, y, args.eta)


def _write(text: str, path: Optional[str]) -> None:
    if path and path != "-":
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise ParseError(f"cannot write {path}: {exc}") from exc
    else:
        sys.stdout.write(text)


def cmd_construct(args) -> int:
    T = _template_source(args)
    _write(dumps(T), args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    T = _template_source(args)
    lines = verify_template(T)
    if args.format == "json":
        text = json.dumps([ln.to_json() for ln in lines], indent=2, ensure_ascii=False) + "\n"
    else:
        text = "\n".join(ln.to_text() for ln in lines) + "\n"
    _write(text, args.output)
    failures = [ln for ln in lines if ln.failed]
    for ln in failures:
        print(f"verification failed: {ln.to_text()}", file=sys.stderr)
    return EXIT_VERIFY if failures else EXIT_OK


def cmd_sweep(args) -> int:
    threads = int(os.environ.get("PGN_THREADS", "1") or 1)
    rule = args.rule if args.rule else ("mu0" if args.kind == "sim" else "nu0")
    out = run_sweep(args.kind, _parse_ns(args.n), args.values, args.count, rule,
                    args.eta_rule, args.format, threads)
    _write(out, args.output)
    return EXIT_OK


def cmd_render(args) -> int:
    T = _template_source(args)
    T.require_valid()
    _write(render_svg(T, args.periods, args.width, args.height), args.output)
    return EXIT_OK


def _add_template_args(p: argparse.ArgumentParser, with_file: bool = True) -> None:
    if with_file:
        p.add_argument("template", nargs="?", help="template JSON file ('-' for stdin)")
    p.add_argument("--kind", choices=["sim", "dual", "trivial"])
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--t", help="rational t in (0,1)")
    p.add_argument("--mu", help="rational, mu0, -t/n or interpolate:k/m")
    p.add_argument("--s", help="rational s in (-n,0)")
    p.add_argument("--nu", help="rational, nu0, -s/n or interpolate:k/m")
    p.add_argument("--eta", help="extended construction: rational, sigma/gamma or frac:k/m")
    p.add_argument("-o", "--output", help="output file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pgn", description="Exact n-template constructions and checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a template and print it as JSON")
    _add_template_args(p, with_file=False)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", help="run the full verification battery")
    _add_template_args(p)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="tabulate a parameter grid")
    p.add_argument("--kind", choices=["sim", "dual"], default="sim")
    p.add_argument("--n", default="2", help="e.g. 3, 2,4 or 2..5")
    p.add_argument("--values", help="comma-separated t (or s) values")
    p.add_argument("--count", type=int, help="k/(count+1) grid, times -n for dual")
    p.add_argument("--rule", help="mu/nu rule: mu0, -t/n, nu0, -s/n, interpolate:k/m or a rational")
    p.add_argument("--eta-rule", help="extended construction: sigma/gamma, frac:k/m or a rational")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("render", help="draw a template as SVG")
    _add_template_args(p)
    p.add_argument("--periods", type=int, default=2)
    p.add_argument("--width", type=int, default=800)
    p.add_argument("--height", type=int, default=500)
    p.set_defaults(func=cmd_render)
    return parser


# options whose values may start with '-' (e.g. "--mu -1/4", "--rule -t/n")
_VALUE_OPTIONS = {"--t", "--mu", "--s", "--nu", "--eta", "--rule", "--eta-rule", "--values"}


def _attach_negative_values(argv: Sequence[str]) -> list[str]:
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_OPTIONS:
            nxt = next(it, None)
            if nxt is None:
                out.append(tok)
            elif nxt.startswith("-") and nxt not in _VALUE_OPTIONS:
                out.append(f"{tok}={nxt}")
            else:
                out += [tok, nxt]
        else:
            out.append(tok)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_attach_negative_values(sys.argv[1:] if argv is None else argv))
    try:
        return args.func(args)
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except InvalidTemplateError as exc:
        print(f"error: invalid template: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
