import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from quadorbits.counting import (FULL, CountSeries, GroupSpec, HypothesisViolated, _canonical,
                                 bfs_orbit_values, orbit_constant, orbit_count, orbit_data,
                                 orbit_values, predicted_constant, psi, psi_constant,
                                 psi_values_fast, psi_values_oracle, report, run_series,
                                 sector_points)
from quadorbits.pell import fundamental_pell4, regulator_bits, unit_power
from quadorbits.qforms import Form, GL2Int, automorph
from quadorbits.quadirr import QuadIrr, canonical_mod_translation

Q_PHI = Form(1, -1, -1)
PHI = QuadIrr.parse("(1+sqrt(5))/2")
GROUPS = [FULL] + [GroupSpec(k, p) for p in (2, 3, 5) for k in ("principal", "hecke0")]


def test_group_indices():
    assert (FULL.index(), FULL.q()) == (1, 1)
    assert (GroupSpec("principal", 2).index(), GroupSpec("principal", 2).q()) == (6, 2)
    assert GroupSpec("principal", 3).index() == 12 and GroupSpec("principal", 3).q() == 3
    assert GroupSpec("principal", 5).index() == 60
    assert GroupSpec("hecke0", 4).index() == 6 and GroupSpec("hecke0", 4).q() == 1
    assert GroupSpec("hecke0", 7).index() == 8
    assert GroupSpec.parse("gamma0(3)") == GroupSpec("hecke0", 3)
    with pytest.raises(ValueError):
        GroupSpec.parse("weird")


@pytest.mark.parametrize("group", GROUPS[1:] + [GroupSpec("principal", 12), GroupSpec("hecke0", 9)])
def test_completion_lemma(group):
    p = group.p
    for c in range(-12, 13):
        for d in range(-12, 13):
            if math.gcd(c, d) != 1 or not group.admissible(c, d):
                continue
            M = group.complete(c, d)
            assert (M.c, M.d) == (c, d) and group.contains(M)
            # two completions differ by a translation in G
            N = GL2Int(M.a + group.q() * c, M.b + group.q() * d, c, d)
            assert group.contains(N)


def test_psi_examples():
    assert psi(Q_PHI, 0) == 0
    assert psi_values_oracle(Q_PHI, 11) == [1, 1, 5, 5, 11, 11, 11, 11]
    assert psi(Q_PHI, 11, engine="both") == 8


def test_psi_errors():
    with pytest.raises(ValueError):
        psi(Form(1, 0, -4), 10)
    with pytest.raises(HypothesisViolated, match="hypothesis violated"):
        psi(Form(2, 1, -2), 10, GroupSpec("hecke0", 3))
    with pytest.raises(ValueError):
        psi(Q_PHI, 10, engine="nope")


@pytest.mark.parametrize("Q", [Form(1, -1, -1), Form(1, 0, -2), Form(3, 1, -1), Form(1, 1, -4), Form(-2, 3, 4)])
@pytest.mark.parametrize("group", GROUPS)
def test_engines_agree(Q, group):
    if group.kind == "hecke0" and Q.A % group.p != 1 % group.p:
        return
    assert psi_values_fast(Q, 200, group) == psi_values_oracle(Q, 200, group)


def test_engines_agree_imprimitive():
    Q = Form(2, -2, -2)
    assert psi_values_fast(Q, 150) == psi_values_oracle(Q, 150)
    assert psi(Q, 150) == psi(Form(1, -1, -1), 75)


@pytest.mark.parametrize("Q", [Q_PHI, Form(1, 0, -3), Form(2, 3, -1)])
def test_automorph_invariance(Q):
    sol = fundamental_pell4(Q.D)
    g = automorph(Q, sol.t, sol.u)
    gi = g.inv()
    for (x, y) in sector_points(Q, 500):
        gx = (g.a * x + g.b * y, g.c * x + g.d * y)
        assert _canonical(gx, g, gi, True) == _canonical((x, y), g, gi, True)


def test_sector_gives_one_point_per_orbit():
    Q = Form(1, 0, -3)
    sol = fundamental_pell4(Q.D)
    g = automorph(Q, sol.t, sol.u)
    keys = [_canonical(x, g, g.inv(), True) for x in sector_points(Q, 400)]
    assert len(keys) == len(set(keys))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 400), st.integers(0, 400))
def test_monotone(s1, s2):
    a, b = sorted((s1, s2))
    assert psi(Form(1, 0, -7), a) <= psi(Form(1, 0, -7), b)
    assert orbit_count(PHI, FULL, a + 1) <= orbit_count(PHI, FULL, b + 1)


def test_threads_do_not_change_result():
    assert psi_values_fast(Q_PHI, 3000, threads=3) == psi_values_fast(Q_PHI, 3000)
    assert orbit_values(PHI, FULL, 300, threads=2) == orbit_values(PHI, FULL, 300)


def test_orbit_contains_phi():
    vals = orbit_values(PHI, FULL, Fraction(9, 10))
    assert canonical_mod_translation(PHI) in vals
    with pytest.raises(ValueError):
        orbit_count(PHI, FULL, 0)


@pytest.mark.parametrize("s", [1, 2, 3, 5, 10, 20, 35, 50])
def test_orbit_matches_bfs(s):
    assert orbit_values(PHI, FULL, s) == bfs_orbit_values(PHI, s)


def test_orbit_matches_bfs_other_irrationals():
    for a in (QuadIrr.parse("sqrt(2)"), QuadIrr.parse("sqrt(3)"), QuadIrr.parse("(1+sqrt(13))/2")):
        for s in (3, 10):
            assert orbit_values(a, FULL, s) == bfs_orbit_values(a, s)


def test_reciprocity_flags():
    assert orbit_data(PHI, FULL).reciprocal
    assert not orbit_data(PHI, GroupSpec("principal", 2)).reciprocal
    assert orbit_data(PHI, GroupSpec("hecke0", 2)).reciprocal
    assert not orbit_data(PHI, GroupSpec("hecke0", 3)).reciprocal
    assert not orbit_data(QuadIrr.parse("sqrt(3)"), FULL).reciprocal


@pytest.mark.parametrize("D,Q", [(5, Form(1, -1, -1)), (8, Form(1, 0, -2)), (13, Form(1, 1, -3))])
def test_cross_theorem(D, Q):
    a = QuadIrr.from_form(Q)
    iq = 2 if orbit_data(a).reciprocal else 1
    for s in range(1, 101):
        assert orbit_count(a, FULL, s) * iq == 2 * psi(Q, math.isqrt(s * s * D) // 2), s


def test_predicted_constants():
    R = regulator_bits(fundamental_pell4(5), 80)
    assert float(predicted_constant("psi", D=5, R=R)) == pytest.approx(12 * 0.9624236501192069 / (math.pi ** 2 * math.sqrt(5)))
    assert float(predicted_constant("separation", R=R, n0=2)) == pytest.approx(24 * math.log((1 + 5 ** 0.5) / 2) / math.pi ** 2)
    assert float(orbit_constant(PHI)) == pytest.approx(12 * math.log((1 + 5 ** 0.5) / 2) / math.pi ** 2)
    assert float(psi_constant(Q_PHI, GroupSpec("principal", 2))) == pytest.approx(0.52331, abs=1e-4)
    with pytest.raises(ValueError):
        predicted_constant("nope")


def test_orbit_density_matches_constant():
    for group in (FULL, GroupSpec("principal", 2), GroupSpec("hecke0", 3)):
        s = 3000
        ratio = orbit_count(PHI, group, s) / s
        assert ratio == pytest.approx(float(orbit_constant(PHI, group)), rel=0.03)


def test_series_and_report():
    ser = run_series(lambda s: math.floor(s), [10, 100, 1000], predicted=1.0)
    rows = report(ser)
    assert [r["count"] for r in rows] == [10, 100, 1000]
    assert all(r["rel_gap"] == 0 for r in rows)
    assert report(run_series(lambda s: s, [])) == []
    with pytest.raises(ValueError):
        run_series(lambda s: s, [3, 2])
    with pytest.raises(ValueError):
        CountSeries([1, 2], [3, 1])


def test_psi_series_gap_shrinks():
    c = float(psi_constant(Q_PHI))
    gaps = [abs(psi(Q_PHI, s) / s - c) for s in (10 ** 3, 10 ** 4, 10 ** 5)]
    assert gaps[-1] < gaps[0]


def test_congruence_membership_prime_levels():
    sol = fundamental_pell4(5)
    for p in (2, 3, 5, 7, 11, 13, 17, 19):
        for k in range(1, 21):
            t, u = unit_power(5, sol.t, sol.u, k)
            m = automorph(Q_PHI, t, u).mod(p)
            pm_identity = m in ((1 % p, 0, 0, 1 % p), ((-1) % p, 0, 0, (-1) % p))
            assert pm_identity == (u % p == 0)


def test_congruence_membership_composite_counterexample():
    # p = 8: p | u but the automorph is a scalar other than +-I mod 8
    sol = fundamental_pell4(5)
    for k in range(1, 21):
        t, u = unit_power(5, sol.t, sol.u, k)
        if u % 8 == 0:
            m = automorph(Q_PHI, t, u).mod(8)
            assert m[1] == m[2] == 0 and m[0] == m[3] and m[0] not in (1, 7)
            break
    else:
        pytest.fail("no power with 8 | u")
