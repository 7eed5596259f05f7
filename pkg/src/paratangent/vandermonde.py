"""Multivariate Vandermonde matrices V(A) and the determinant quantities built on them."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import linalg
from .multiindex import IndexSet, dimension, enumerate_indices, monomial_eval, vandermonde_exponent
from .scalars import EXACT, FLOAT, Scalar, check_mode, dist2, infer_mode, is_exact, to_scalar

# slack for the ball check on float node sets
BALL_RTOL = 1e-12


class SingularMatrixError(ValueError):
    """Raised when a Vandermonde matrix that must be invertible is not."""

    def __init__(self, message: str, determinant: Scalar = 0):
        super().__init__(message)
        self.determinant = determinant


@dataclass(frozen=True)
class NodeSet:
    """Distinct points of R^n with a designated base point and an optional ball radius.

    Coordinates are converted to a single carrier: exact ``Fraction`` if
    every input is rational, else ``float`` (or as forced by ``mode``).
    If ``radius`` is given every point must lie in the closed ball of that
    radius around the base point.
    """

    points: tuple
    center_index: int = 0
    radius: Scalar | None = None
    mode: str | None = field(default=None, compare=False)

    def __post_init__(self):
        pts = [tuple(p) for p in self.points]
        if not pts:
            raise ValueError("a node set needs at least one point")
        n = len(pts[0])
        if n < 1 or any(len(p) != n for p in pts):
            raise ValueError("all points must share the same positive dimension")
        raw = [x for p in pts for x in p]
        if self.radius is not None:
            raw.append(self.radius)
        mode = check_mode(self.mode) if self.mode is not None else infer_mode(raw)
        pts = tuple(tuple(to_scalar(x, mode) for x in p) for p in pts)
        if len(set(pts)) != len(pts):
            raise ValueError("node set contains repeated points")
        if not 0 <= self.center_index < len(pts):
            raise ValueError(f"center index {self.center_index} out of range")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "mode", mode)
        if self.radius is not None:
            r = to_scalar(self.radius, mode)
            if r < 0:
                raise ValueError("radius must be non-negative")
            object.__setattr__(self, "radius", r)
            c = pts[self.center_index]
            r2 = r * r
            slack = 0 if mode == EXACT else BALL_RTOL * max(r2, 1e-300)
            for p in pts:
                if dist2(p, c) > r2 + slack:
                    raise ValueError(f"point {p} lies outside the ball of radius {r} about {c}")

    @property
    def n(self) -> int:
        return len(self.points[0])

    @property
    def center(self) -> tuple:
        return self.points[self.center_index]

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def diameter2(self) -> Scalar:
        """Squared diameter (max squared pairwise distance); exact for rational points."""
        pts = self.points
        zero = Fraction(0) if self.mode == EXACT else 0.0
        return max((dist2(a, b) for i, a in enumerate(pts) for b in pts[i + 1:]), default=zero)

    def translated(self, v) -> "NodeSet":
        v = tuple(to_scalar(x, self.mode) for x in v)
        pts = tuple(tuple(x + y for x, y in zip(p, v)) for p in self.points)
        return NodeSet(pts, self.center_index, self.radius, self.mode)

    def scaled(self, lam) -> "NodeSet":
        lam = to_scalar(lam, self.mode)
        pts = tuple(tuple(lam * x for x in p) for p in self.points)
        r = None if self.radius is None else abs(lam) * self.radius
        return NodeSet(pts, self.center_index, r, self.mode)

    def centered(self) -> "NodeSet":
        """A - a_0: the base point moved to the origin."""
        c = self.center
        return self.translated(tuple(-x for x in c))

    def with_mode(self, mode: str) -> "NodeSet":
        return NodeSet(self.points, self.center_index, self.radius, mode)


def as_nodeset(nodes, mode: str | None = None) -> NodeSet:
    if isinstance(nodes, NodeSet):
        return nodes if mode is None or nodes.mode == mode else nodes.with_mode(mode)
    return NodeSet(tuple(tuple(p) for p in nodes), mode=mode)


@dataclass(frozen=True)
class VMatrix:
    """Rows indexed by points, columns by the exponents of I(n, d) in graded-lex order."""

    n: int
    d: int
    entries: tuple

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def indices(self) -> IndexSet:
        return enumerate_indices(self.n, self.d)

    def rows(self) -> list[list]:
        return [list(r) for r in self.entries]

    def to_numpy(self) -> np.ndarray:
        return np.array(self.entries, dtype=float)


def evaluation_rows(points: Sequence[Sequence], n: int, d: int) -> list[list]:
    """Monomials of degree <= d evaluated at each point (a possibly non-square V)."""
    idx = enumerate_indices(n, d)
    return [[monomial_eval(p, j) for j in idx] for p in points]


def build(nodes, d: int) -> VMatrix:
    nodes = as_nodeset(nodes)
    n = nodes.n
    need = dimension(n, d)
    if len(nodes) != need:
        raise ValueError(f"V(A) for n={n}, d={d} needs N(n,d) = {need} points, got {len(nodes)}")
    rows = evaluation_rows(nodes.points, n, d)
    return VMatrix(n, d, tuple(tuple(r) for r in rows))


def determinant(m: VMatrix) -> Scalar:
    """Exact (Bareiss) for rational entries, LU with partial pivoting for floats."""
    return linalg.det(m.entries)


def _normalized_nodes(nodes: NodeSet) -> NodeSet:
    if nodes.radius is None or nodes.radius <= 0:
        raise ValueError("normalized determinant needs a positive radius")
    r = nodes.radius
    c = nodes.center
    pts = tuple(tuple((x - y) / r for x, y in zip(p, c)) for p in nodes.points)
    return NodeSet(pts, nodes.center_index, None, nodes.mode)


def normalized_determinant(nodes: NodeSet, d: int) -> Scalar:
    """Det V((A - a_0) / r), equal to Det V(A) / r^(n N(n+1, d-1)).

    Nodes are translated and rescaled before elimination so the matrix stays
    of unit scale however small r is.
    """
    return determinant(build(_normalized_nodes(nodes), d))


def affine_image_determinant_check(nodes, affine_map, d: int) -> tuple[Scalar, Scalar]:
    """``(Det V(phi(A)), (Det P)^N(n+1, d-1) * Det V(A))``; the two agree exactly for rational data.

    ``affine_map`` needs ``linear`` (n x n rows), ``translation`` and to be callable on points.
    """
    nodes = as_nodeset(nodes)
    det_p = linalg.det(affine_map.linear)
    if det_p == 0:
        raise SingularMatrixError("affine map has a singular linear part", det_p)
    image = NodeSet(tuple(affine_map(p) for p in nodes.points), nodes.center_index)
    lhs = determinant(build(image, d))
    rhs = det_p ** dimension(nodes.n + 1, d - 1) * determinant(build(nodes, d))
    return lhs, rhs


def inverse_row_scales(nodes: NodeSet, d: int) -> list[Scalar]:
    """For each multi-index p_i: r^|p_i| times the largest |entry| of row i of V(A - a_0)^-1.

    Computed as the row maxima of the inverse of the normalized matrix
    V((A - a_0)/r), which equals diag(r^|p_i|) V(A - a_0)^-1.
    """
    scaled = build(_normalized_nodes(nodes), d)
    try:
        inv = linalg.inverse(scaled.entries)
    except np.linalg.LinAlgError:
        raise SingularMatrixError(
            "Vandermonde matrix of the centered nodes is singular (determinant 0)",
            determinant(build(nodes.centered(), d)),
        ) from None
    return [max(abs(x) for x in row) for row in inv]


__all__ = [
    "NodeSet",
    "VMatrix",
    "SingularMatrixError",
    "as_nodeset",
    "evaluation_rows",
    "build",
    "determinant",
    "normalized_determinant",
    "affine_image_determinant_check",
    "inverse_row_scales",
    "vandermonde_exponent",
    "EXACT",
    "FLOAT",
    "is_exact",
]
