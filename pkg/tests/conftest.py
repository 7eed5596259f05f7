import random
from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import strategies as st

from paratangent.multiindex import dimension

ACCEPTANCE_LOG = []


def rand_rational(rng, lo=-20, hi=20, den=9):
    return Fraction(rng.randint(lo, hi), rng.randint(1, den))


def rand_points(rng, n, count, **kw):
    pts = set()
    while len(pts) < count:
        pts.add(tuple(rand_rational(rng, **kw) for _ in range(n)))
    return sorted(pts, key=lambda p: rng.random())


def leibniz_det(rows):
    """Permutation-sum determinant; independent of any elimination scheme."""
    size = len(rows)
    total = 0
    for perm in permutations(range(size)):
        inversions = sum(1 for i in range(size) for j in range(i + 1, size) if perm[i] > perm[j])
        term = -1 if inversions % 2 else 1
        for i, j in enumerate(perm):
            term *= rows[i][j]
            if term == 0:
                break
        total += term
    return total


def univariate_product(nodes):
    out = Fraction(1)
    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            out *= nodes[j] - nodes[i]
    return out


rationals = st.fractions(min_value=-10, max_value=10, max_denominator=12)


def point_sets(n, count):
    return st.lists(st.tuples(*[rationals] * n), min_size=count, max_size=count, unique=True)


@pytest.fixture
def rng():
    return random.Random(20261018)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LOG:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LOG:
            terminalreporter.write_line(line)
