import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from systole_census.errors import DomainError
from systole_census.quad_forms import (
    Mat2,
    QuadForm,
    automorph,
    class_cycles,
    class_number,
    discriminant,
    enumerate_reduced_forms,
    form_action,
    fundamental_unit,
    is_reduced,
    reduce_form,
    reduction_step,
)

from oracles import class_number_orbit_oracle, random_sl2_word

GOLDEN = QuadForm(1, 1, -1)


def valid_discriminants(limit):
    from systole_census.integer_arith import is_perfect_square

    return [D for D in range(5, limit + 1) if D % 4 in (0, 1) and not is_perfect_square(D)]


def test_discriminant_examples():
    assert discriminant(GOLDEN) == 5
    assert discriminant(QuadForm(1, 2, -2)) == 12
    assert discriminant(QuadForm(1, 0, -3)) == 12


def test_is_reduced_examples():
    assert is_reduced(GOLDEN)
    assert not is_reduced(QuadForm(1, 0, -3))  # b = 0
    assert is_reduced(QuadForm(-2, 2, 1))


def test_is_reduced_rejects_square_discriminant():
    with pytest.raises(DomainError):
        is_reduced(QuadForm(1, 3, 0))  # D = 9


def test_reduction_step_examples():
    assert reduction_step(GOLDEN) == QuadForm(-1, 1, 1)
    assert reduction_step(QuadForm(1, 2, -2)) == QuadForm(-2, 2, 1)


def test_reduction_step_rejects_non_reduced():
    with pytest.raises(DomainError):
        reduction_step(QuadForm(1, 0, -3))


def test_reduction_step_periodicity():
    for D in (5, 12, 21, 77):
        for cycle in class_cycles(D):
            f = cycle.canonical
            g = f
            for _ in range(len(cycle)):
                g = reduction_step(g)
            assert g == f


@settings(max_examples=60)
@given(st.sampled_from(valid_discriminants(300)), st.randoms())
def test_reduction_step_preserves_discriminant_and_primitivity(D, rnd):
    forms = enumerate_reduced_forms(D)
    f = rnd.choice(forms)
    g = reduction_step(f)
    assert discriminant(g) == D
    assert g.content() == 1
    assert is_reduced(g)


def test_class_cycles_d5():
    cycles = class_cycles(5)
    assert len(cycles) == 1
    assert GOLDEN in cycles[0]


def test_class_cycles_d12():
    cycles = class_cycles(12)
    sets = [set(map(tuple, c.forms)) for c in cycles]
    assert {(1, 2, -2), (-2, 2, 1)} in sets
    assert {(-1, 2, 2), (2, 2, -1)} in sets


def test_class_cycles_rejects_bad_discriminants():
    with pytest.raises(DomainError):
        class_cycles(7)  # 3 mod 4
    with pytest.raises(DomainError):
        class_cycles(16)  # perfect square
    with pytest.raises(DomainError):
        class_cycles(-20)


def test_cycle_entries_are_reduced_and_linked():
    for D in (5, 12, 21, 165, 437):
        for cycle in class_cycles(D):
            assert all(is_reduced(f) for f in cycle.forms)
            n = len(cycle)
            for i, f in enumerate(cycle.forms):
                assert reduction_step(f) == cycle.forms[(i + 1) % n]


def test_cycles_partition_all_reduced_forms():
    for D in (5, 12, 21, 165, 221, 437):
        cycles = class_cycles(D)
        union = [f for c in cycles for f in c.forms]
        assert sorted(union) == enumerate_reduced_forms(D)
        assert len(set(union)) == len(union)


def test_class_number_examples():
    assert class_number(5) == 1
    assert class_number(12) == 2
    assert class_number(3 * 3 - 4) == 1


def test_class_number_against_orbit_oracle_small():
    for D in valid_discriminants(100):
        assert class_number(D) == class_number_orbit_oracle(D), D


def test_fundamental_unit_n3():
    unit = fundamental_unit(3)
    assert (unit.t, unit.u, unit.D) == (3, 1, 5)
    # equals twice the log of the golden ratio
    assert unit.log_value == pytest.approx(0.9624236501192069, rel=1e-12)
    assert unit.log_value == pytest.approx(2 * math.log((1 + math.sqrt(5)) / 2), rel=1e-12)


def test_fundamental_unit_pell_identity():
    for N in range(3, 200):
        u = fundamental_unit(N)
        assert u.t * u.t - u.D * u.u * u.u == 4
        assert u.log_value > 0


def test_fundamental_unit_n10_nonsquarefree_discriminant():
    from systole_census.integer_arith import is_squarefree

    u = fundamental_unit(10)
    assert u.D == 96 and not is_squarefree(96)
    assert u.t * u.t - 96 * u.u * u.u == 4


def test_fundamental_unit_rejects_small_n():
    with pytest.raises(DomainError):
        fundamental_unit(2)


def test_automorph_example():
    M = automorph(GOLDEN, 3)
    assert M == Mat2(1, 1, 1, 2)
    assert M.det == 1 and M.trace == 3


def test_automorph_fixes_form_across_levels():
    for N in (3, 5, 9, 13, 21):
        D = N * N - 4
        for cycle in class_cycles(D):
            for f in cycle.forms:
                M = automorph(f, N)
                assert M.trace == N and M.det == 1
                assert form_action(f, M) == f


def test_automorph_rejects_discriminant_mismatch():
    with pytest.raises(DomainError):
        automorph(GOLDEN, 5)


def test_reduce_form_lands_on_cycle():
    rng = random.Random(11)
    for D in (5, 12, 21, 165):
        cycles = class_cycles(D)
        for cycle in cycles:
            f = cycle.canonical
            T = Mat2(*random_sl2_word(rng, 8))
            g = form_action(f, T)
            assert discriminant(g) == D
            assert reduce_form(g) in cycle.forms
