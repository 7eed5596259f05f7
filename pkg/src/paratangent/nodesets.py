"""Hdeg of finite point sets, unisolvent subset selection and Lagrange interpolation."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import linalg
from .multiindex import dimension, enumerate_indices, monomial_eval
from .scalars import EXACT, Scalar, coerce_all, infer_mode, to_scalar
from .vandermonde import NodeSet, as_nodeset, build, determinant, evaluation_rows


class UnisolvenceError(ValueError):
    """The node set does not determine a unique interpolant."""

    def __init__(self, message: str, determinant: Scalar = 0):
        super().__init__(message)
        self.determinant = determinant


@dataclass(frozen=True)
class Polynomial:
    """Coefficients aligned with I(n, d) in graded-lex order."""

    n: int
    d: int
    coefficients: tuple

    def __post_init__(self):
        need = dimension(self.n, self.d)
        if len(self.coefficients) != need:
            raise ValueError(f"polynomial of degree <= {self.d} in {self.n} variables needs {need} coefficients")
        object.__setattr__(self, "coefficients", tuple(self.coefficients))

    def __call__(self, point) -> Scalar:
        return evaluate_polynomial(self, point)

    def terms(self):
        """Pairs ``(exponents, coefficient)`` with nonzero coefficient."""
        return [(p.exponents, c) for p, c in zip(enumerate_indices(self.n, self.d), self.coefficients) if c != 0]

    def degree(self) -> int:
        """Actual degree (-1 for the zero polynomial)."""
        degs = [p.degree for p, c in zip(enumerate_indices(self.n, self.d), self.coefficients) if c != 0]
        return max(degs, default=-1)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coefficients)


def evaluate_polynomial(p: Polynomial, point: Sequence) -> Scalar:
    if len(point) != p.n:
        raise ValueError(f"polynomial in {p.n} variables evaluated at a {len(point)}-vector")
    total = 0
    for idx, c in zip(enumerate_indices(p.n, p.d), p.coefficients):
        if c:
            total = total + c * monomial_eval(point, idx)
    return total


@dataclass(frozen=True)
class HdegResult:
    """``value`` is None when no nonzero polynomial of degree <= ``bound`` vanishes on the points."""

    value: int | None
    witness: Polynomial | None
    bound: int

    @property
    def exceeds_bound(self) -> bool:
        return self.value is None


def _normalize_witness(coeffs: list, n: int, e: int) -> list:
    # first nonzero top-degree coefficient becomes 1
    degs = [p.degree for p in enumerate_indices(n, e)]
    top = max(d for d, c in zip(degs, coeffs) if c != 0)
    lead = next(c for d, c in zip(degs, coeffs) if d == top and c != 0)
    return [c / lead for c in coeffs]


def hdeg(points: Sequence[Sequence], bound: int, mode: str | None = None) -> HdegResult:
    """Least degree e <= bound of a nonzero polynomial vanishing at every point.

    Checks e = 1, 2, ... for a kernel of the (points x monomials of degree
    <= e) evaluation matrix; the kernel vector is returned as witness,
    scaled so that its first nonzero top-degree coefficient is 1.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    pts = [tuple(p) for p in points]
    if len(set(pts)) != len(pts):
        raise ValueError("hdeg needs distinct points")
    if not pts:
        raise ValueError("hdeg of the empty set is 0 by convention; pass at least one point")
    mode = mode or infer_mode(x for p in pts for x in p)
    pts = [coerce_all(p, mode) for p in pts]
    n = len(pts[0])
    exact = mode == EXACT
    for e in range(1, bound + 1):
        ncols = dimension(n, e)
        rows = evaluation_rows(pts, n, e)
        v = linalg.kernel_vector(rows, ncols, exact)
        if v is not None:
            coeffs = _normalize_witness(v, n, e)
            return HdegResult(e, Polynomial(n, e, coeffs), bound)
    return HdegResult(None, None, bound)


@dataclass(frozen=True)
class SelectionFailure:
    """No N(n, d)-subset is unisolvent; ``rank`` is the rank the greedy scan reached."""

    rank: int
    required: int

    def __bool__(self) -> bool:
        return False


def select_unisolvent(points: Sequence[Sequence], n: int, d: int, mode: str | None = None):
    """Greedy unisolvent subset: keep a point iff it raises the rank of the kept rows.

    Candidates are scanned in input order, so the result is deterministic.
    Returns a ``NodeSet`` of N(n, d) points or a ``SelectionFailure``.
    """
    pts = [tuple(p) for p in points]
    if any(len(p) != n for p in pts):
        raise ValueError(f"all points must have {n} coordinates")
    need = dimension(n, d)
    mode = mode or infer_mode(x for p in pts for x in p)
    pts = [coerce_all(p, mode) for p in pts]
    basis = linalg.RowBasis(need, exact=mode == EXACT)
    idx = enumerate_indices(n, d)
    chosen = []
    for p in pts:
        if p in chosen:
            continue
        if basis.try_add([monomial_eval(p, j) for j in idx]):
            chosen.append(p)
            if len(chosen) == need:
                return NodeSet(tuple(chosen), mode=mode)
    return SelectionFailure(len(basis), need)


def interpolate(nodes, values: Sequence, d: int) -> Polynomial:
    """The unique polynomial of degree <= d taking ``values`` at ``nodes``."""
    nodes = as_nodeset(nodes)
    if len(values) != len(nodes):
        raise ValueError(f"{len(nodes)} nodes but {len(values)} values")
    mode = nodes.mode if infer_mode(values) == EXACT else "float"
    nodes = nodes.with_mode(mode) if nodes.mode != mode else nodes
    values = coerce_all(values, mode)
    v = build(nodes, d)
    det = determinant(v)
    if det == 0:
        raise UnisolvenceError("nodes are not unisolvent: Vandermonde determinant vanishes", det)
    try:
        coeffs = linalg.solve(v.entries, values)
    except np.linalg.LinAlgError:
        raise UnisolvenceError("nodes are not unisolvent: Vandermonde matrix is singular", det) from None
    return Polynomial(nodes.n, d, tuple(coeffs))


__all__ = [
    "Polynomial",
    "HdegResult",
    "SelectionFailure",
    "UnisolvenceError",
    "hdeg",
    "select_unisolvent",
    "interpolate",
    "evaluate_polynomial",
]
