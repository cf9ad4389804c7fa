"""Shared builders and independent oracles for the test suite.

Oracles here deliberately avoid the library code paths: walk enumeration
filters raw letter tuples, distances come from an integer Smith normal
form, zeta values from direct partial sums.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import pytest

from treezeta.graphs import DirectedGraph


def fig2():
    """Theta graph: vertices P=0, Q=1; positive 1: P->Q, 2: Q->P, 3: P->Q."""
    return DirectedGraph.build([0, 1], [(1, 0, 1), (2, 1, 0), (3, 0, 1)])


def single_loop():
    return DirectedGraph.build([0], [(0, 0, 0)])


def rose(g):
    return DirectedGraph.build([0], [(i, 0, 0) for i in range(g)])


def two_cycle():
    return DirectedGraph.build([0, 1], [(0, 0, 1), (1, 1, 0)])


def oracle_walks(g, n, mode="walks"):
    """Brute force: filter all letter tuples by admissibility."""
    letters = g.oriented if mode == "walks" else g.positive_oriented
    out = []
    for tup in itertools.product(letters, repeat=n):
        ok = all(g.rng(a) == g.src(b) and b != g.invol(a)
                 for a, b in zip(tup, tup[1:]))
        if mode == "paths":
            ok = ok and all(w in g.positive_oriented for w in tup)
        if ok:
            out.append(tup)
    return out


def smith_valuations(mat, p):
    """Elementary divisor p-valuations of a rational 2x2 matrix via integer SNF."""
    m = [[Fraction(x) for x in row] for row in mat]
    scale = 1
    for row in m:
        for x in row:
            scale = scale * x.denominator // _gcd(scale, x.denominator)
    im = [[int(x * scale) for x in row] for row in m]
    d1, d2 = _snf2(im)
    return _vp(d1, p) - _vp(scale, p), _vp(d2, p) - _vp(scale, p)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _vp(n, p):
    if n == 0:
        raise ValueError("zero has no finite valuation")
    v = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        v += 1
    return v


def _snf2(m):
    """Smith normal form divisors (d1 | d2) of an integer 2x2 matrix."""
    a, b = m[0]
    c, d = m[1]
    det = a * d - b * c
    if det == 0:
        raise ValueError("singular")
    g = _gcd(_gcd(abs(a), abs(b)), _gcd(abs(c), abs(d)))
    return g, abs(det) // g


@pytest.fixture(scope="session")
def ctx2():
    from treezeta.padic import PadicContext
    return PadicContext(2)


@pytest.fixture(scope="session")
def patch2_r3(ctx2):
    from treezeta.lattices import build_tree_patch
    return build_tree_patch(ctx2, radius=3)
