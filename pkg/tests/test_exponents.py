from __future__ import annotations

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pgn.constructions import (
    build_dual,
    build_dual_extended,
    build_simultaneous,
    build_simultaneous_extended,
    mu0,
    nu0,
    rho,
    sim_params,
    tau,
    trivial_template,
)
from pgn.exactnum import INF, IndeterminateFormError, QuadExt
from pgn.exponents import (
    ClassicalExponents,
    Status,
    check_BL1,
    check_BL2,
    check_chain,
    check_ge,
    check_khintchine,
    check_splitting,
    check_SS1,
    check_SS2,
    classical_from_template,
    equality_surface_BL1,
    equality_surface_BL2,
    from_classical,
    splitting_forced,
    to_classical,
)
from pgn.template import PhiLimits, phi_limits

EQ, STRICT, BAD = Status.EQUALITY, Status.STRICT, Status.VIOLATED


def limits(n, l1=0, u1=0, ln=0, un=0):
    lower = [QuadExt(0)] * (n + 1)
    upper = [QuadExt(0)] * (n + 1)
    lower[0], upper[0], lower[n], upper[n] = QuadExt(l1), QuadExt(u1), QuadExt(ln), QuadExt(un)
    return PhiLimits(tuple(lower), tuple(upper))


def dirichlet(n):
    return ClassicalExponents(QuadExt(1) / n, QuadExt(1) / n, QuadExt(n), QuadExt(n))


def _corpus():
    t = F(1, 2)
    out = [trivial_template(2), trivial_template(3)]
    out += [build_simultaneous(2, t, F(-1, 4)), build_simultaneous(2, t, mu0(2, t))]
    out += [build_simultaneous(3, F(1, 3), mu0(3, F(1, 3))), build_simultaneous(4, F(2, 5), F(-1, 8))]
    out += [build_dual(2, F(-1, 2), F(1, 4)), build_dual(3, -1, nu0(3, -1)), build_dual(4, F(-3, 2), F(1, 2))]
    p = sim_params(3, t, mu0(3, t))
    out += [build_simultaneous_extended(3, t, p.mu, p.sigma / 2)]
    out += [build_simultaneous_extended(2, t, mu0(2, t), 0)]
    out += [build_dual_extended(2, F(-1, 2), nu0(2, F(-1, 2)), 0)]
    return out


CORPUS = _corpus()
IDS = [f"{T.kind}-{T.n}-{i}" for i, T in enumerate(CORPUS)]


# transference ---------------------------------------------------------------


def test_to_classical_examples():
    for n in (2, 3, 5):
        assert to_classical(limits(n), n).as_tuple() == dirichlet(n).as_tuple()
    e = to_classical(limits(2, F(-1, 4), 0, 0, F(1, 2)), 2)
    assert e.omega == F(5, 7) and e.omega_star == 5 and e.omega_hat_star == 2
    e = to_classical(limits(3, -3, 0, 0, 0), 3)
    assert e.omega == INF
    e = to_classical(limits(3, 0, 0, 0, 1), 3)
    assert e.omega_star == INF


@pytest.mark.parametrize("T", CORPUS, ids=IDS)
def test_transference_round_trip(T):
    n = T.n
    L = phi_limits(T)
    back = from_classical(to_classical(L, n), n)
    assert back == {"lower_1": L.lower[0], "upper_1": L.upper[0], "upper_last": L.upper[n], "lower_last": L.lower[n]}


@settings(max_examples=100)
@given(st.integers(2, 6), st.lists(st.fractions(0, 1, max_denominator=40), min_size=4, max_size=4))
def test_transference_round_trip_property(n, fr):
    l1, u1 = -n + n * fr[0], -n + n * fr[1]
    ln, un = fr[2], fr[3]
    L = limits(n, l1, u1, ln, un)
    e = to_classical(L, n)
    # transference identities hold exactly
    if e.omega != INF:
        assert (1 + e.omega) * (n + L.lower[0]) == n + 1
    if e.omega_star != INF:
        assert (1 + e.omega_star) * (1 - L.upper[n]) == n + 1
    assert from_classical(e, n) == {"lower_1": l1, "upper_1": u1, "upper_last": un, "lower_last": ln}


# Bugeaud-Laurent and SS forms ---------------------------------------------------


def test_bl_examples():
    e = ClassicalExponents(QuadExt(F(5, 7)), QuadExt(F(1, 2)), QuadExt(5), QuadExt(2))
    assert check_BL1(e, 2).status is EQ
    for n in (2, 3, 4):
        assert check_BL1(dirichlet(n), n).status is EQ
        assert check_BL2(dirichlet(n), n).status is EQ
        bad = ClassicalExponents(QuadExt(1) / n, QuadExt(1) / n, QuadExt(n), QuadExt(n + 1))
        res = check_BL1(bad, n)
        assert res.status is BAD and res.residual < 0


def test_bl_infinite_cases():
    e = ClassicalExponents(INF, QuadExt(F(1, 2)), INF, QuadExt(2))
    assert check_BL1(e, 2).status is STRICT
    # w^ = 1 sends the second right-hand side to infinity
    e = ClassicalExponents(INF, QuadExt(1), INF, INF)
    assert check_BL2(e, 2).status is EQ


def test_ss_examples():
    for n in (2, 3):
        assert check_SS1(limits(n), n).status is EQ
        assert check_SS2(limits(n), n).status is EQ
    T = build_simultaneous(2, F(1, 2), F(-1, 4))
    assert check_SS1(phi_limits(T), 2).status is EQ
    # psi_1 = -1/4, Psi_3 = 1/2, psi_3 = 1/4: residual -15/16 (Violated);
    # the transferred exponents violate BL1 consistently
    L = limits(2, F(-1, 4), 0, F(1, 4), F(1, 2))
    res = check_SS1(L, 2)
    assert res.status is BAD and res.residual == F(-15, 16)
    assert check_BL1(to_classical(L, 2), 2).status is BAD


@pytest.mark.parametrize("T", CORPUS, ids=IDS)
def test_ss_bl_equivalence(T):
    n = T.n
    L = phi_limits(T)
    e = to_classical(L, n)
    assert check_SS1(L, n).status is check_BL1(e, n).status
    assert check_SS2(L, n).status is check_BL2(e, n).status


@settings(max_examples=200)
@given(st.integers(2, 5), st.lists(st.fractions(F(1, 60), F(59, 60), max_denominator=60), min_size=4, max_size=4))
def test_ss_bl_equivalence_property(n, fr):
    # psi_1 <= Psi_1 <= 0 <= psi_{n+1} <= Psi_{n+1}, strictly inside
    l1 = -n * fr[0]
    u1 = l1 * fr[1]
    un = fr[2]
    ln = un * fr[3]
    L = limits(n, l1, u1, ln, un)
    e = to_classical(L, n)
    assert check_SS1(L, n).status is check_BL1(e, n).status
    # the second form divides by 1 - w^, so it only transfers while w^ < 1
    if e.omega_hat < 1:
        assert check_SS2(L, n).status is check_BL2(e, n).status


def test_check_ge_orientation():
    assert check_ge(QuadExt(2), QuadExt(1)).residual == 1
    assert check_ge(INF, QuadExt(3)).status is STRICT
    assert check_ge(INF, INF).status is EQ
    assert check_ge(QuadExt(0), INF).status is BAD


# Khintchine and splitting ---------------------------------------------------


def test_khintchine_examples():
    for n in (2, 3, 4):
        left, right = check_khintchine(dirichlet(n), n)
        assert left.status is EQ and right.status is EQ
    e = ClassicalExponents(QuadExt(F(5, 7)), QuadExt(F(1, 2)), QuadExt(5), QuadExt(2))
    left, right = check_khintchine(e, 2)
    assert left.status is STRICT and left.residual == 5 - (2 * F(5, 7) + 1)
    assert right.status is EQ


def test_splitting_examples():
    for n in (2, 3):
        (a, b), (c, d) = check_splitting(dirichlet(n), n)
        assert all(r.status is EQ for r in (a, b, c, d))
    w_hat = (1 + F(1, 5)) / (1 + F(7, 5))
    e = ClassicalExponents(QuadExt(F(5, 7)), QuadExt(w_hat), QuadExt(5), QuadExt(2))
    (up, lo), _ = check_splitting(e, 2)
    assert up.status is EQ and lo.status is EQ
    with pytest.raises(IndeterminateFormError):
        check_splitting(ClassicalExponents(INF, QuadExt(F(1, 2)), INF, QuadExt(3)), 2)


@pytest.mark.parametrize("T", CORPUS, ids=IDS)
def test_splitting_forced(T):
    assert splitting_forced(classical_from_template(T), T.n) == []


def test_constructions_hit_splitting_equalities():
    for n in (2, 3, 4):
        for k in range(1, 6):
            t = F(k, 6)
            m = mu0(n, t)
            for mu in (m, (m - t / n) / 2, -t / n):
                e = classical_from_template(build_simultaneous(n, t, mu))
                assert check_BL1(e, n).status is EQ
                (up, lo), _ = check_splitting(e, n)
                assert up.status is EQ and lo.status is EQ
                assert e.omega_hat == (1 + 1 / e.omega_star) / (1 + 1 / e.omega)


# equality surfaces -------------------------------------------------------------


def test_surface_bl1_examples():
    w_hat_star, w_hat, member = equality_surface_BL1(2, QuadExt(5), QuadExt(F(5, 7)))
    assert member and w_hat_star == 2
    assert w_hat == (1 + F(1, 5)) / (1 + F(7, 5))
    for n in (2, 3, 4):
        w_hat_star, _, member = equality_surface_BL1(n, QuadExt(n), QuadExt(1) / n)
        assert member and w_hat_star == n
    assert not equality_surface_BL1(2, QuadExt(5), QuadExt(2)).member
    assert not equality_surface_BL1(3, QuadExt(2), QuadExt(1)).member
    sp = equality_surface_BL1(2, INF, INF)
    assert sp.member and sp.first == INF and sp.note


def test_surface_bl1_endpoints_are_members():
    for n in (2, 3):
        for ws in (QuadExt(n + 1), QuadExt(7)):
            lo, hi = rho(n, ws)
            assert equality_surface_BL1(n, ws, lo).member
            assert equality_surface_BL1(n, ws, hi).member


def test_surface_bl2_examples():
    for n in (2, 3, 4):
        w_hat, _, member = equality_surface_BL2(n, QuadExt(1) / n, QuadExt(n))
        assert member and w_hat == QuadExt(1) / n
    assert tau(2, 1)[1] > 4
    w_hat, w_hat_star, member = equality_surface_BL2(2, QuadExt(1), QuadExt(4))
    assert member and w_hat == F(3, 5) and w_hat_star == F(5, 2)
    sp = equality_surface_BL2(2, INF, INF)
    assert sp.member and sp.first == 1 and "limit" in sp.note
    assert not equality_surface_BL2(2, QuadExt(1), QuadExt(5)).member


def test_surface_points_satisfy_bl_equality():
    for n in (2, 3):
        ws = QuadExt(n + 2)
        lo, hi = rho(n, ws)
        for w in (lo, (lo + hi) / 2, hi):
            whs, wh, _ = equality_surface_BL1(n, ws, w)
            assert check_BL1(ClassicalExponents(w, wh, ws, whs), n).status is EQ
        w = QuadExt(1)
        lo, hi = tau(n, w)
        for ws in (lo, (lo + hi) / 2, hi):
            wh, whs, _ = equality_surface_BL2(n, w, ws)
            assert check_BL2(ClassicalExponents(w, wh, ws, whs), n).status is EQ


def test_rho2_strictly_below_khintchine_bound():
    for n in range(2, 6):
        for k in range(1, 40):
            ws = n + QuadExt(F(k, 4))
            assert rho(n, ws)[1] < (ws - n + 1) / n


def test_tau2_strictly_below_khintchine_bound():
    for n in range(2, 6):
        d = QuadExt(1) / n
        assert tau(n, d)[1] == n * d / (1 - (n - 1) * d)
        top = QuadExt(1) / (n - 1)
        for k in range(1, 40):
            w = d + (top - d) * F(k, 40)
            assert tau(n, w)[1] < n * w / (1 - (n - 1) * w)


# identity chains -------------------------------------------------------------


def test_chain_trivial():
    for n in (2, 3, 4, 5):
        e = classical_from_template(trivial_template(n))
        res = check_chain(e, n)
        assert set(res) >= {"vi", "top"}
        assert all(r.status is EQ for r in res.values())


def test_chain_constructions():
    for n in (3, 4):
        e = classical_from_template(build_simultaneous(n, F(1, 3), mu0(n, F(1, 3))))
        res = check_chain(e, n)
        assert res["top"].status is EQ
        assert all(r.status is EQ for k, r in res.items() if k.startswith("down"))
        e = classical_from_template(build_dual(n, F(-1), nu0(n, -1)))
        res = check_chain(e, n)
        assert res["vi"].status is EQ
        assert all(r.status is EQ for k, r in res.items() if k.startswith("up"))


@pytest.mark.parametrize("T", CORPUS, ids=IDS)
def test_chain_inequalities_hold(T):
    res = check_chain(classical_from_template(T), T.n)
    assert all(r.holds for r in res.values())


def test_chain_needs_intermediates():
    with pytest.raises(ValueError):
        check_chain(dirichlet(3), 3)


@pytest.mark.parametrize("T", CORPUS, ids=IDS)
def test_intermediate_endpoints(T):
    e = classical_from_template(T)
    assert e.intermediate[0] == e.omega
    assert e.intermediate[-1] == e.omega_star
