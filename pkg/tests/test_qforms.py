import random

import pytest
from hypothesis import given, settings

from quadorbits.pell import fundamental_pell4, has_negative_unit
from quadorbits.qforms import (IDENTITY, Form, GL2Int, act, alpha_of, automorph, fundamental_automorph,
                               brute_force_equivalent, class_representatives, classify, cycle,
                               equivalent, form_of, forms_of_discriminant, is_reciprocal_form,
                               is_reduced, reciprocal_witness, reduce_form)
from quadorbits.quadirr import QuadIrr, is_reciprocal_irr, mobius
from quadorbits.quadfield import is_square

from conftest import indefinite_forms, sl2_matrices

PHI_FORM = Form(1, -1, -1)


def test_classify_examples():
    assert classify(PHI_FORM) == {"content": 1, "primitive": True, "indefinite": True,
                                  "irreducible": True, "D": 5}
    c = classify(Form(2, 0, -2))
    assert c["content"] == 2 and not c["primitive"] and c["D"] == 16 and not c["irreducible"]
    assert not classify(Form(1, 0, 1))["indefinite"]


def test_zero_form_rejected():
    with pytest.raises(ValueError):
        Form(0, 0, 0)


def test_act_examples():
    assert act(PHI_FORM, IDENTITY) == PHI_FORM
    assert act(PHI_FORM, GL2Int(1, 1, 0, 1)) == Form(1, 1, -1)
    with pytest.raises(ValueError):
        act(PHI_FORM, GL2Int(0, 1, 1, 0))


def test_automorph_examples():
    assert automorph(PHI_FORM, 3, 1) == GL2Int(2, 1, 1, 1)
    assert automorph(PHI_FORM, 2, 0) == IDENTITY
    assert automorph(PHI_FORM, -3, -1) == -GL2Int(2, 1, 1, 1)
    with pytest.raises(ValueError):
        automorph(PHI_FORM, 4, 1)
    with pytest.raises(ValueError):
        automorph(Form(2, 1, -1), 3, 1)  # D = 9, not a Pell solution


def test_alpha_of_examples():
    assert alpha_of(PHI_FORM) == QuadIrr.parse("(1+sqrt(5))/2")
    with pytest.raises(ValueError):
        alpha_of(Form(1, 0, -4))
    with pytest.raises(ValueError):
        alpha_of(Form(0, 1, 1))


def test_form_of_examples():
    assert form_of(QuadIrr.parse("(1+sqrt(5))/2")) == PHI_FORM
    assert form_of(QuadIrr.parse("sqrt(2)")) == Form(1, 0, -2)
    assert form_of(QuadIrr.parse("(1+sqrt(5))/4")) == Form(4, -2, -1)


def test_equivalent_examples():
    assert equivalent(PHI_FORM, Form(1, 1, -1))
    ok, w = equivalent(PHI_FORM, Form(1, 1, -1), witness=True)
    assert ok and act(PHI_FORM, w) == Form(1, 1, -1)
    a, b = Form(1, 0, -7), Form(7, 0, -1)
    assert equivalent(a, b) == brute_force_equivalent(a, b)
    assert not equivalent(PHI_FORM, Form(1, 0, -2))


def test_reciprocal_examples():
    assert is_reciprocal_form(PHI_FORM)
    assert reciprocal_witness(PHI_FORM) is not None
    assert is_reciprocal_form(Form(1, 0, -12)) == brute_force_equivalent(Form(1, 0, -12), Form(-1, 0, 12))
    assert not is_reciprocal_form(Form(1, 0, -12))


@given(indefinite_forms(), sl2_matrices(), sl2_matrices())
def test_act_is_right_action(Q, g, h):
    assert act(Q, g @ h) == act(act(Q, g), h)
    assert act(Q, g).D == Q.D and act(Q, g).content() == Q.content()


@given(indefinite_forms(bound=15))
def test_automorph_powers(Q):
    sol = fundamental_pell4(Q.D)
    g = automorph(Q, sol.t, sol.u)
    for k in range(1, 5):
        sk = sol.power(k)
        gk = automorph(Q, sk.t, sk.u)
        assert gk == g ** k
        assert act(Q, gk) == Q


@given(indefinite_forms(), sl2_matrices())
def test_alpha_of_laws(Q, g):
    assert alpha_of(-Q) == alpha_of(Q).conj()
    assert alpha_of(act(Q, g)) == mobius(g.inv(), alpha_of(Q))


@given(indefinite_forms(), sl2_matrices())
def test_equivalent_to_translate(Q, g):
    ok, w = equivalent(Q, act(Q, g), witness=True)
    assert ok and act(Q, w) == act(Q, g)


@given(indefinite_forms())
def test_reduction(Q):
    R, g = reduce_form(Q)
    assert is_reduced(R) and act(Q, g) == R
    for C, h in cycle(Q):
        assert is_reduced(C) and act(R, h) == C


def test_equivalence_against_brute_force():
    rng = random.Random(7)
    Ds = [D for D in range(5, 201) if D % 4 in (0, 1) and not is_square(D)]
    checked = 0
    while checked < 100:
        D = rng.choice(Ds)
        fs = forms_of_discriminant(D)
        if len(fs) < 2:
            continue
        a, b = rng.choice(fs), rng.choice(fs)
        ok, w = equivalent(a, b, witness=True)
        bf = brute_force_equivalent(a, b)
        if bf or not ok:
            assert ok == bf, (a, b)
        else:
            # the search box is too small: every witness g^k w is large
            assert act(a, w) == b
            g = fundamental_automorph(a)
            smallest = min(max(map(abs, ((g ** k) @ w).tuple())) for k in range(-6, 7))
            assert smallest > 50, (a, b)
        checked += 1


def test_class_representatives_are_inequivalent():
    reps = class_representatives(136)
    for i, a in enumerate(reps):
        for b in reps[i + 1:]:
            assert not equivalent(a, b)


def test_reciprocity_three_ways():
    for D in range(5, 1001):
        if D % 4 not in (0, 1) or is_square(D):
            continue
        Q = Form(1, D % 2, (D % 2 - D) // 4)
        a = is_reciprocal_form(Q)
        assert a == has_negative_unit(D) == is_reciprocal_irr(alpha_of(Q)), D
