"""LLL reduction and sup-norm box enumeration."""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from badkr.lattice import (SupBoxEnum, enum_sup_box, lll_fraction, lll_reduce,
                           shortest_vector)


def _check_lll(R, delta=0.99):
    R = np.array(R, dtype=float)
    n = R.shape[0]
    Bs = np.zeros_like(R)
    mu = np.zeros((n, n))
    for i in range(n):
        Bs[i] = R[i]
        for j in range(i):
            mu[i, j] = (R[i] @ Bs[j]) / (Bs[j] @ Bs[j])
            Bs[i] -= mu[i, j] * Bs[j]
    for i in range(n):
        for j in range(i):
            assert abs(mu[i, j]) <= 0.5 + 1e-9
    for k in range(1, n):
        lhs = Bs[k] @ Bs[k] + mu[k, k - 1] ** 2 * (Bs[k - 1] @ Bs[k - 1])
        assert lhs >= (delta - 1e-9) * (Bs[k - 1] @ Bs[k - 1])


def test_lll_float_conditions_and_unimodular():
    rng = np.random.default_rng(7)
    for _ in range(20):
        B = rng.integers(-30, 30, size=(4, 4)).astype(float)
        if abs(np.linalg.det(B)) < 0.5:
            continue
        R, U = lll_reduce(B)
        _check_lll(R)
        Uf = np.array([[float(x) for x in row] for row in U])
        assert np.allclose(Uf @ B, R, atol=1e-6)
        assert abs(round(np.linalg.det(Uf))) == 1


def test_lll_fraction_exact():
    rows = [[Fraction(10 ** 12), Fraction(0)],
            [Fraction(10 ** 12) + 1, Fraction(1, 10 ** 12)]]
    red, U = lll_fraction(rows)
    # exact unimodular transform, huge dynamic range preserved
    det_u = U[0][0] * U[1][1] - U[0][1] * U[1][0]
    assert abs(det_u) == 1
    for i in range(2):
        got = [sum(Fraction(U[i][k]) * rows[k][j] for k in range(2))
               for j in range(2)]
        assert got == red[i]
    _check_lll([[float(x) for x in r] for r in red], delta=0.75)


def test_shortest_vector_matches_brute_force():
    rng = np.random.default_rng(3)
    for _ in range(10):
        B = rng.integers(-8, 8, size=(3, 3)).astype(float)
        if abs(np.linalg.det(B)) < 0.5:
            continue
        length, coeffs, vec = shortest_vector(B)
        best = math.inf
        for z in itertools.product(range(-6, 7), repeat=3):
            if z == (0, 0, 0):
                continue
            v = np.array(z, dtype=float) @ B
            best = min(best, float(np.linalg.norm(v)))
        assert length == pytest.approx(best, rel=1e-9)
        assert np.linalg.norm(np.array(coeffs, dtype=float) @ B) == \
            pytest.approx(length, rel=1e-9)
        assert np.linalg.norm(vec) == pytest.approx(length, rel=1e-9)


def test_enum_sup_box_frozen_case():
    # T = [[1,0],[1,1]], box |z1| <= 3, |z1 + z2| <= 2
    T = [[Fraction(1), Fraction(0)], [Fraction(1), Fraction(1)]]
    M = [Fraction(3), Fraction(2)]
    got = enum_sup_box(T, M)
    expect = set()
    for z1 in range(-3, 4):
        for z2 in range(-10, 11):
            if abs(z1) <= 3 and abs(z1 + z2) <= 2:
                expect.add((z1, z2))
    assert got is not None
    assert set(got) == expect
    assert len(expect) == 35


@settings(max_examples=40, deadline=None)
@given(hst.integers(1, 6), hst.integers(1, 6),
       hst.integers(-3, 3), hst.integers(1, 5))
def test_enum_sup_box_vs_brute(m1, m2, off, scale):
    T = [[Fraction(scale), Fraction(off)], [Fraction(0), Fraction(1)]]
    M = [Fraction(m1), Fraction(m2)]
    got = enum_sup_box(T, M)
    assert got is not None
    expect = set()
    span = m1 + m2 * abs(off) + 2
    for z1 in range(-span, span + 1):
        for z2 in range(-m2 - 1, m2 + 2):
            if abs(scale * z1 + off * z2) <= m1 and abs(z2) <= m2:
                expect.add((z1, z2))
    assert set(got) == expect


def test_sup_box_affine_interval():
    # asymmetric box via SupBoxEnum directly: 2 <= z1 <= 5, |z2| <= 1
    T = [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]]
    e = SupBoxEnum(T, [(Fraction(2), Fraction(5)), (Fraction(-1), Fraction(1))])
    got = set(e)
    assert got == {(z1, z2) for z1 in range(2, 6) for z2 in (-1, 0, 1)}
    assert not e.capped


def test_sup_box_node_cap_sets_flag():
    T = [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]]
    e = SupBoxEnum(T, [(Fraction(-500), Fraction(500))] * 2, node_cap=50)
    list(e)
    assert e.capped
    assert enum_sup_box(T, [Fraction(500)] * 2, node_cap=50) is None


def test_sup_box_lazy_yields_before_cap():
    T = [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]]
    e = SupBoxEnum(T, [(Fraction(-200), Fraction(200))] * 2, node_cap=10 ** 6)
    first = next(iter(e))
    assert max(abs(first[0]), abs(first[1])) <= 200
    assert e.nodes < 10 ** 4
