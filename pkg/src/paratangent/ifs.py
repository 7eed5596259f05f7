"""Affine contractions, iterated function systems and nodal sequences accumulating at fixed points."""

from __future__ import annotations

import itertools
import math
from math import lcm
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import linalg
from .scalars import EXACT, FLOAT, Scalar, dist2, infer_mode, sqrt_exact, sqrt_scalar, sqrt_upper, to_scalar
from .vandermonde import NodeSet, SingularMatrixError, as_nodeset

SIMILARITY_ATOL = 1e-12
DEDUP_ATOL = 1e-12


@dataclass(frozen=True)
class AffineMap:
    """x -> L x + t with L given as rows."""

    linear: tuple
    translation: tuple
    mode: str | None = field(default=None, compare=False)

    def __post_init__(self):
        lin = [tuple(r) for r in self.linear]
        t = tuple(self.translation)
        n = len(t)
        if n < 1 or len(lin) != n or any(len(r) != n for r in lin):
            raise ValueError("affine map needs an n x n linear part and an n-vector translation")
        mode = self.mode or infer_mode([x for r in lin for x in r] + list(t))
        object.__setattr__(self, "linear", tuple(tuple(to_scalar(x, mode) for x in r) for r in lin))
        object.__setattr__(self, "translation", tuple(to_scalar(x, mode) for x in t))
        object.__setattr__(self, "mode", mode)

    @classmethod
    def scaling(cls, ratio, translation, mode: str | None = None) -> "AffineMap":
        """x -> ratio * x + translation."""
        n = len(translation)
        zero = 0 if mode != FLOAT else 0.0
        lin = [[ratio if i == j else zero for j in range(n)] for i in range(n)]
        return cls(lin, tuple(translation), mode)

    @property
    def n(self) -> int:
        return len(self.translation)

    def __call__(self, x) -> tuple:
        return tuple(sum(a * b for a, b in zip(row, x)) + t for row, t in zip(self.linear, self.translation))

    def __matmul__(self, other: "AffineMap") -> "AffineMap":
        """``self @ other`` is the composite self o other (other applied first)."""
        mode = EXACT if self.mode == EXACT and other.mode == EXACT else FLOAT
        n = self.n
        lin = [[sum(self.linear[i][k] * other.linear[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
        t = self(other.translation)
        return AffineMap(lin, t, mode)

    def power(self, k: int) -> "AffineMap":
        if k < 0:
            raise ValueError("negative power")
        result = identity(self.n, self.mode)
        for _ in range(k):
            result = self @ result
        return result

    def linear_det(self) -> Scalar:
        return linalg.det(self.linear)

    def scalar_part(self):
        """c if L == c * I, else None (exact comparison)."""
        c = self.linear[0][0]
        n = self.n
        for i in range(n):
            for j in range(n):
                if self.linear[i][j] != (c if i == j else 0):
                    return None
        return c

    def ratio_squared(self) -> Scalar | None:
        """lambda^2 when L^T L = lambda^2 I (within SIMILARITY_ATOL in float mode), else None."""
        n = self.n
        gram = [[sum(self.linear[k][i] * self.linear[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
        c = gram[0][0]
        for i in range(n):
            for j in range(n):
                want = c if i == j else 0
                if self.mode == EXACT:
                    if gram[i][j] != want:
                        return None
                elif abs(gram[i][j] - want) > SIMILARITY_ATOL:
                    return None
        return c if c > 0 else None

    def is_similarity(self) -> bool:
        return self.ratio_squared() is not None

    def similarity_ratio(self) -> Scalar:
        r2 = self.ratio_squared()
        if r2 is None:
            raise ValueError("map is not a similarity")
        return sqrt_scalar(r2)

    def contraction_bound(self) -> float:
        """Operator 2-norm of the linear part (the smallest Lipschitz constant)."""
        r2 = self.ratio_squared()
        if r2 is not None:
            return math.sqrt(float(r2))
        return float(np.linalg.norm(np.array(self.linear, dtype=float), 2))

    def is_contraction(self) -> bool:
        r2 = self.ratio_squared()
        if r2 is not None:
            return r2 < 1
        return self.contraction_bound() < 1


def identity(n: int, mode: str | None = EXACT) -> AffineMap:
    zero, one = (0.0, 1.0) if mode == FLOAT else (0, 1)
    return AffineMap([[one if i == j else zero for j in range(n)] for i in range(n)], [zero] * n, mode)


@dataclass(frozen=True)
class IfsSystem:
    maps: tuple
    name: str = ""

    def __post_init__(self):
        maps = tuple(self.maps)
        if not maps:
            raise ValueError("an IFS needs at least one map")
        n = maps[0].n
        if any(m.n != n for m in maps):
            raise ValueError("all maps must act on the same R^n")
        for i, m in enumerate(maps, 1):
            if not m.is_contraction():
                raise ValueError(f"map {i} is not a contraction")
        object.__setattr__(self, "maps", maps)

    @property
    def n(self) -> int:
        return self.maps[0].n

    @property
    def mode(self) -> str:
        return EXACT if all(m.mode == EXACT for m in self.maps) else FLOAT

    @property
    def all_similarities(self) -> bool:
        return all(m.is_similarity() for m in self.maps)

    @property
    def self_similar(self) -> bool:
        return len(self.maps) >= 2 and self.all_similarities

    def __len__(self) -> int:
        return len(self.maps)


def fixed_point(m: AffineMap) -> tuple:
    """The unique x with m(x) = x, i.e. the solution of (I - L) x = t."""
    c = m.scalar_part()
    if c is not None:
        if c == 1:
            raise SingularMatrixError("I - L is singular: 1 is an eigenvalue of the linear part", 0)
        return tuple(t / (1 - c) for t in m.translation)
    n = m.n
    one = 1.0 if m.mode == FLOAT else 1
    a = [[(one if i == j else 0) - m.linear[i][j] for j in range(n)] for i in range(n)]
    try:
        return tuple(linalg.solve(a, m.translation))
    except np.linalg.LinAlgError:
        raise SingularMatrixError("I - L is singular: 1 is an eigenvalue of the linear part", 0) from None


def compose(system: IfsSystem, word: Sequence[int]) -> AffineMap:
    """phi_{i1} o ... o phi_{iq} for a word of 1-based map indices."""
    word = list(word)
    if not word:
        raise ValueError("empty word")
    p = len(system.maps)
    for i in word:
        if not 1 <= i <= p:
            raise ValueError(f"map index {i} out of range 1..{p}")
    result = system.maps[word[-1] - 1]
    for i in reversed(word[:-1]):
        result = system.maps[i - 1] @ result
    return result


def _dedup_float(points) -> list:
    cell = DEDUP_ATOL
    grid: dict = {}
    kept = []
    for p in points:
        key = tuple(math.floor(x / cell) for x in p)
        dup = False
        for off in itertools.product((-1, 0, 1), repeat=len(p)):
            for q in grid.get(tuple(k + o for k, o in zip(key, off)), ()):
                if math.sqrt(dist2(p, q)) < DEDUP_ATOL:
                    dup = True
                    break
            if dup:
                break
        if not dup:
            grid.setdefault(key, []).append(p)
            kept.append(p)
    return kept


def williams_points(system: IfsSystem, max_depth: int) -> list[tuple]:
    """Fixed points of all compositions of at most ``max_depth`` maps, sorted by coordinates.

    Exact systems are deduplicated by equality, float systems within
    ``DEDUP_ATOL``. The union over all depths is dense in the attractor.
    """
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    scalars = [m.scalar_part() for m in system.maps]
    found = []
    if system.mode == EXACT and scalars[0] is not None and all(c == scalars[0] for c in scalars):
        found = _williams_common_ratio(scalars[0], [m.translation for m in system.maps], max_depth)
    elif all(c is not None for c in scalars):
        # x -> c x + t composes as (c1 c2, c1 t2 + t1): no matrix products needed
        level = [(c, m.translation) for c, m in zip(scalars, system.maps)]
        for depth in range(1, max_depth + 1):
            found.extend(tuple(t / (1 - c) for t in tr) for c, tr in level)
            if depth < max_depth:
                level = [
                    (ci * c, tuple(ci * x + y for x, y in zip(tr, ti)))
                    for ci, ti in zip(scalars, (m.translation for m in system.maps))
                    for c, tr in level
                ]
    else:
        level = list(system.maps)
        for depth in range(1, max_depth + 1):
            found.extend(fixed_point(m) for m in level)
            if depth < max_depth:
                level = [phi @ m for phi in system.maps for m in level]
    if system.mode == EXACT:
        unique = set(found)
        return sorted(unique, key=lambda p: (tuple(float(x) for x in p), p))
    return sorted(_dedup_float(sorted(found)))


def _williams_common_ratio(c: Fraction, translations, max_depth: int) -> list:
    """Williams points for maps x -> c x + t_i sharing one rational ratio c = a/b.

    Works on integer vectors U_q = L b^(q-1) T_q (L the common denominator of
    the t_i), where T_q is the translation of a length-q composite; then
    U_q = a U_(q-1) + b^(q-1) L t_i and the fixed point is U_q b / (L (b^q - a^q)).
    """
    c = Fraction(c)
    a, b = c.numerator, c.denominator
    L = lcm(*(Fraction(x).denominator for t in translations for x in t))
    base = [tuple(int(Fraction(x) * L) for x in t) for t in translations]
    found = []
    level = list(base)
    for q in range(1, max_depth + 1):
        den = L * (b ** q - a ** q)
        found.extend(tuple(Fraction(u * b, den) for u in vec) for vec in level)
        if q < max_depth:
            bq = b ** q
            level = [
                tuple(a * u + bq * v for u, v in zip(vec, ti))
                for ti in base
                for vec in level
            ]
    return found


@dataclass(frozen=True)
class SequenceEntry:
    k: int
    nodes: NodeSet
    values: tuple | None = None

    @property
    def radius(self) -> Scalar:
        return self.nodes.radius

    @property
    def center(self) -> tuple:
        return self.nodes.center


@dataclass(frozen=True)
class NodalSequence:
    """Node sets A_k with base points a_0^k and radii r_k, in increasing k."""

    entries: tuple
    d: int | None = None

    def __post_init__(self):
        entries = tuple(self.entries)
        if not entries:
            raise ValueError("empty nodal sequence")
        n = entries[0].nodes.n
        for e in entries:
            if e.nodes.n != n:
                raise ValueError("all node sets must live in the same R^n")
            if e.nodes.radius is None:
                raise ValueError(f"entry k={e.k} has no radius")
            if e.values is not None and len(e.values) != len(e.nodes):
                raise ValueError(f"entry k={e.k}: {len(e.values)} values for {len(e.nodes)} nodes")
        object.__setattr__(self, "entries", entries)

    @property
    def n(self) -> int:
        return self.entries[0].nodes.n

    @property
    def mode(self) -> str:
        return EXACT if all(e.nodes.mode == EXACT for e in self.entries) else FLOAT

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def radii(self) -> list:
        return [e.radius for e in self.entries]

    def centers(self) -> list:
        return [e.center for e in self.entries]

    def with_values(self, values: Sequence[Sequence]) -> "NodalSequence":
        if len(values) != len(self.entries):
            raise ValueError(f"{len(values)} value lists for {len(self.entries)} entries")
        return NodalSequence(tuple(SequenceEntry(e.k, e.nodes, tuple(v)) for e, v in zip(self.entries, values)), self.d)

    @classmethod
    def from_node_lists(cls, node_lists, radii, d: int | None = None, start: int = 1, mode: str | None = None):
        entries = tuple(
            SequenceEntry(k, NodeSet(tuple(map(tuple, pts)), 0, r, mode))
            for k, (pts, r) in enumerate(zip(node_lists, radii), start)
        )
        return cls(entries, d)


def iterate_word(system: IfsSystem, word: Sequence[int], base, K: int, d: int | None = None) -> NodalSequence:
    """A_k = psi^k(base) for psi = compose(word), k = 1..K.

    The base point of A_k is psi^k of the base point of ``base`` and
    r_k = 2 lambda^k max{|x - s| : x in base}, s the fixed point of psi.
    In exact mode an irrational r_k is replaced by a rational upper bound
    (12 decimal digits), which keeps every ball check exact.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if not system.all_similarities:
        raise ValueError("iterate_word needs a system of similarities")
    psi = compose(system, word)
    base = as_nodeset(base)
    mode = EXACT if system.mode == EXACT and base.mode == EXACT else FLOAT
    if base.mode != mode:
        base = base.with_mode(mode)
    if psi.mode != mode:
        psi = AffineMap(psi.linear, psi.translation, mode)
    s = fixed_point(psi)
    lam2 = psi.ratio_squared()
    far2 = max(dist2(x, s) for x in base.points)
    entries = []
    pts = base.points
    for k in range(1, K + 1):
        pts = tuple(psi(p) for p in pts)
        r2 = 4 * far2 * lam2 ** k
        r = sqrt_upper(r2) if mode == EXACT else math.sqrt(r2)
        entries.append(SequenceEntry(k, NodeSet(pts, base.center_index, r, mode)))
    return NodalSequence(tuple(entries), d)


def _catalog_cantor() -> IfsSystem:
    third = Fraction(1, 3)
    return IfsSystem((AffineMap.scaling(third, (0,)), AffineMap.scaling(third, (Fraction(2, 3),))), "cantor")


def _catalog_sierpinski() -> IfsSystem:
    half = Fraction(1, 2)
    vs = [(0, 0), (half, 0), (0, half)]
    return IfsSystem(tuple(AffineMap.scaling(half, v) for v in vs), "sierpinski")


def _catalog_koch() -> IfsSystem:
    c, s = 0.5 / 3, (math.sqrt(3) / 2) / 3
    third = 1 / 3
    maps = (
        AffineMap([[third, 0.0], [0.0, third]], (0.0, 0.0)),
        AffineMap([[c, -s], [s, c]], (third, 0.0)),
        AffineMap([[c, s], [-s, c]], (0.5, math.sqrt(3) / 6)),
        AffineMap([[third, 0.0], [0.0, third]], (2 * third, 0.0)),
    )
    return IfsSystem(maps, "koch")


def _catalog_menger() -> IfsSystem:
    third = Fraction(1, 3)
    maps = []
    for v in itertools.product(range(3), repeat=3):
        if sum(1 for x in v if x == 1) >= 2:
            continue
        maps.append(AffineMap.scaling(third, tuple(Fraction(x, 3) for x in v)))
    return IfsSystem(tuple(maps), "menger")


_CATALOG = {
    "cantor": _catalog_cantor,
    "sierpinski": _catalog_sierpinski,
    "koch": _catalog_koch,
    "menger": _catalog_menger,
}

CATALOG_NAMES = tuple(_CATALOG)


def catalog(name: str) -> IfsSystem:
    """Cantor set, Sierpinski gasket (right-triangle vertices), Koch curve (float), Menger sponge."""
    try:
        return _CATALOG[name.lower()]()
    except KeyError:
        raise ValueError(f"unknown fractal {name!r}; choose from {', '.join(CATALOG_NAMES)}") from None


__all__ = [
    "AffineMap",
    "IfsSystem",
    "SequenceEntry",
    "NodalSequence",
    "identity",
    "fixed_point",
    "compose",
    "williams_points",
    "iterate_word",
    "catalog",
    "CATALOG_NAMES",
]
