"""Multi-indices, the graded-lex index set I(n, d) and the dimension N(n, d)."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial, prod
from typing import Sequence


@dataclass(frozen=True, order=True)
class MultiIndex:
    exponents: tuple[int, ...]

    def __post_init__(self):
        exps = tuple(int(e) for e in self.exponents)
        if any(e < 0 for e in exps):
            raise ValueError(f"negative exponent in {exps}")
        object.__setattr__(self, "exponents", exps)

    def __len__(self) -> int:
        return len(self.exponents)

    def __iter__(self):
        return iter(self.exponents)

    def __getitem__(self, i):
        return self.exponents[i]

    @property
    def n(self) -> int:
        return len(self.exponents)

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    def factorial(self) -> int:
        """Componentwise product of factorials, ``p! = p_1! ... p_n!``."""
        return prod(factorial(e) for e in self.exponents)

    def __repr__(self) -> str:
        return f"MultiIndex{self.exponents}"


@dataclass(frozen=True)
class IndexSet:
    """I(n, d) in graded-lex order: by total degree, then descending lexicographic.

    For n = 2, d = 2 this is (0,0), (1,0), (0,1), (2,0), (1,1), (0,2).
    """

    n: int
    d: int
    indices: tuple[MultiIndex, ...]

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __getitem__(self, i) -> MultiIndex:
        return self.indices[i]

    def position(self, index) -> int:
        return self.indices.index(index if isinstance(index, MultiIndex) else MultiIndex(tuple(index)))

    def degrees(self) -> list[int]:
        return [p.degree for p in self.indices]


def _check_nd(n: int, d: int) -> None:
    if n < 1:
        raise ValueError(f"dimension n must be >= 1, got {n}")
    if d < 0:
        raise ValueError(f"degree d must be >= 0, got {d}")


def _exactly(n: int, k: int):
    """Tuples of length n summing to k, descending lexicographic."""
    if n == 1:
        yield (k,)
        return
    for first in range(k, -1, -1):
        for rest in _exactly(n - 1, k - first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def enumerate_indices(n: int, d: int) -> IndexSet:
    _check_nd(n, d)
    indices = tuple(MultiIndex(t) for k in range(d + 1) for t in _exactly(n, k))
    return IndexSet(n, d, indices)


def dimension(n: int, d: int) -> int:
    """N(n, d) = binomial(n + d, d); symmetric in its arguments."""
    if n < 0 or d < 0:
        raise ValueError(f"N(n, d) needs non-negative arguments, got ({n}, {d})")
    return comb(n + d, d)


def vandermonde_exponent(n: int, d: int) -> int:
    """Total degree n * N(n+1, d-1) of Det V(A) in the coordinates of A (0 when d = 0)."""
    return n * dimension(n + 1, d - 1) if d >= 1 else 0


def degree_sum_all_forms(n: int, d: int) -> tuple[int, int, int, int, int]:
    """The five closed forms for the degree sum over I(n, d); all five agree.

    Returned in order: the direct sum of |p|, the per-variable count, the
    count by exact degree, the sum of lower dimensions, and n * N(n+1, d-1).
    """
    if n < 1 or d < 1:
        raise ValueError(f"need n >= 1 and d >= 1, got ({n}, {d})")
    s1 = sum(p.degree for p in enumerate_indices(n, d))
    s2 = n * sum(i * dimension(n - 1, d - i) for i in range(1, d + 1))
    s3 = sum(i * dimension(n - 1, i) for i in range(1, d + 1))
    s4 = n * sum(dimension(n, i) for i in range(d))
    s5 = n * dimension(n + 1, d - 1)
    return s1, s2, s3, s4, s5


def monomial_eval(point: Sequence, index) -> object:
    """x^p with 0**0 == 1; keeps the scalar type of ``point``."""
    exps = index.exponents if isinstance(index, MultiIndex) else tuple(index)
    if len(point) != len(exps):
        raise ValueError(f"point has {len(point)} coordinates but index has {len(exps)}")
    result = 1
    for x, e in zip(point, exps):
        if e:
            result = result * x ** e
    if isinstance(result, int) and point and not isinstance(point[0], int):
        return type(point[0])(result)
    return result
