from __future__ import annotations

import itertools

import pytest

from coverbound.families import (
    FamilyError,
    FiniteField,
    AffineFamilyParams,
    InfFamParams,
    affine_block_count,
    affine_flats,
    blowup,
    exactlem2_ell,
    exactth2,
    exactth2_z,
    inffam_check,
    schonheim_direct,
)
from coverbound.classic import Params
from coverbound.oracle import exact_cover_number, is_covering
from coverbound.pipeline import BoundStore, RuleSet, evaluate


def test_inffam_m6():
    r = inffam_check(6)
    assert r.params.astuple() == (148, 32, 5, 1)
    assert r.ell == {2: 146, 3: 30, 4: 6}
    assert r.d == 0
    assert r.theorem_bound >= 3208 == r.promised
    assert r.passed


@pytest.mark.parametrize("m", range(6, 31))
def test_inffam_promise_and_closed_forms(m):
    r = inffam_check(m)
    assert r.theorem_bound >= r.L + m * (m - 4) - 10
    assert r.ell == {4: m, 3: m * (m - 1), 2: m * m * (m - 2) + 2}
    assert r.a == (m, m * (m - 2), m ** 3 - 4 * m * m + 3 * m + 2)
    assert r.d == 0
    if m >= 14:
        assert r.L == m ** 5 - 4 * m ** 4 + 20 * m * m - 10 * m - 45
        assert r.theorem_bound >= m ** 5 - 4 * m ** 4 + 21 * m * m - 14 * m - 55


def test_inffam_range():
    with pytest.raises(FamilyError, match="out of family range"):
        inffam_check(5)
    with pytest.raises(FamilyError, match="out of family range"):
        InfFamParams(2)


@pytest.mark.parametrize("q,t", [(2, 2), (3, 2), (5, 2), (2, 3), (3, 3), (5, 3)])
def test_affine_flats(q, t):
    c = affine_flats(q, t)
    assert c.v == q ** t
    assert len(c.blocks) == affine_block_count(q, t) == q * (q ** t - 1) // (q - 1)
    assert set(c.block_sizes()) == {q ** (t - 1)}
    assert is_covering(c, t)
    assert len(set(c.blocks)) == len(c.blocks)


def test_affine_small_cases():
    c = affine_flats(2, 2)
    assert sorted(map(sorted, c.blocks)) == sorted(map(list, itertools.combinations(range(1, 5), 2)))
    c = affine_flats(3, 2)
    assert len(c.blocks) == 12
    assert exact_cover_number(9, 3, 2) == 12


def test_field_unavailable():
    with pytest.raises(FamilyError, match="field unavailable"):
        affine_flats(4, 2)


GF4_MUL = [
    [0, 0, 0, 0],
    [0, 1, 2, 3],
    [0, 2, 3, 1],
    [0, 3, 1, 2],
]
GF4_ADD = [[a ^ b for b in range(4)] for a in range(4)]


def write_field(path, q, mul, add):
    lines = [str(q)] + [" ".join(map(str, r)) for r in mul] + [" ".join(map(str, r)) for r in add]
    path.write_text("\n".join(lines) + "\n")
    return path


def test_prime_power_field_table(tmp_path):
    f = FiniteField.from_file(write_field(tmp_path / "gf4.txt", 4, GF4_MUL, GF4_ADD))
    c = affine_flats(4, 2, f)
    assert len(c.blocks) == 20
    assert is_covering(c, 2)
    r = exactth2(10, 4, 2, f)
    assert r.certified


def test_bad_field_table(tmp_path):
    bad = [row[:] for row in GF4_MUL]
    bad[2][2] = 1
    with pytest.raises(FamilyError):
        FiniteField.from_file(write_field(tmp_path / "bad.txt", 4, bad, GF4_ADD))
    (tmp_path / "short.txt").write_text("4\n1 2 3\n")
    with pytest.raises(FamilyError):
        FiniteField.from_file(tmp_path / "short.txt")


def test_blowup_full():
    c = blowup(2, 2, 6, 24)
    assert c.v == 24 and len(c.blocks) == 6
    assert set(c.block_sizes()) == {12}
    assert is_covering(c, 2)


def test_blowup_deletion():
    full = blowup(3, 2, 8, 72)
    cut = blowup(3, 2, 8, 69)
    assert len(cut.blocks) == len(full.blocks)
    for a, b in zip(full.blocks, cut.blocks):
        assert b == {x for x in a if x <= 69}
    assert is_covering(cut, 2)


def test_blowup_range():
    with pytest.raises(FamilyError, match="out of range"):
        blowup(2, 2, 6, 25)


def test_exactlem2_examples():
    assert exactlem2_ell(72, 8, 3, 2, 1) == 4
    assert exactlem2_ell(69, 8, 3, 2, 1) == 3
    with pytest.raises(FamilyError, match="closed form out of range"):
        exactlem2_ell(60, 8, 3, 2, 1)
    with pytest.raises(FamilyError, match="closed form out of range"):
        exactlem2_ell(72, 7, 3, 2, 1)
    with pytest.raises(FamilyError, match="closed form out of range"):
        exactlem2_ell(72, 8, 3, 2, 3)


def test_exactlem2_matches_schonheim_on_grid():
    both_branches = set()
    for q in (2, 3, 5, 7):
        for t in (2, 3, 4):
            for m in range(2 * q + 2, 4 * q + 1):
                top = m * q ** t
                for v in range(top - 2 * q + 3, top + 1):
                    both_branches.add(v >= top - q + 2)
                    for i in range(t + 1):
                        assert exactlem2_ell(v, m, q, t, i) == schonheim_direct(v, m, q, t, i)
    assert both_branches == {True, False}


def test_exactth2_example():
    r = exactth2(8, 3, 2)
    assert (r.z, r.v_min, r.exact_value) == (1, 69, 12)
    assert r.certified


@pytest.mark.parametrize("q", [2, 3, 5, 7])
def test_exactth2_z(q):
    for t in (2, 3):
        for m in range(2 * q + 2, 5 * q):
            z = exactth2_z(m, q, t)
            assert 0 <= z <= q - 2
            if m >= 3 * q:
                assert z == q - 2
            if q == 2:
                assert z == 0


def test_exactth2_q2_value():
    for t in (2, 3):
        r = exactth2(7, 2, t, witness=False)
        assert r.exact_value == 2 * (2 ** t - 1)


def test_exactth2_inapplicable():
    with pytest.raises(FamilyError, match="family inapplicable"):
        exactth2(7, 3, 2)


@pytest.mark.parametrize("q,t,m", [(2, 2, 6), (3, 2, 8), (2, 3, 6), (5, 2, 12)])
def test_pipeline_and_blowup_meet_across_window(q, t, m):
    r = exactth2(m, q, t, witness=False)
    k = m * q ** (t - 1)
    store = BoundStore()
    for v in range(r.v_min, r.v_max + 1):
        assert evaluate(Params(v, k, t), store, RuleSet.restricted()).best().value == r.exact_value, v
        cov = blowup(q, t, m, v)
        assert len(cov.blocks) == r.exact_value and is_covering(cov, t), v


def test_affine_family_params():
    fam = AffineFamilyParams(3, 8, 2)
    assert (fam.k, fam.z, fam.v_min, fam.v_max) == (24, 1, 69, 72)
    assert fam.offset(69) == -1 and fam.offset(72) == 2
    with pytest.raises(FamilyError, match="family inapplicable"):
        AffineFamilyParams(3, 7, 2)
