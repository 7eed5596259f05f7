"""Fullness and flatness diagnostics on nodal sequences, plus jet estimation.

Both theorems behind these diagnostics quantify over infinite sequences.
Everything here works on the finite prefix it is given and says so: the
fullness verdict is three-valued and the flatness verdict falls back to
"no conclusion" whenever the finite evidence does not support a claim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from . import linalg
from .ifs import NodalSequence
from .multiindex import dimension, enumerate_indices, monomial_eval, vandermonde_exponent
from .nodesets import UnisolvenceError
from .scalars import EXACT, FLOAT, Scalar, coerce_all, format_scalar, infer_mode, is_exact, log_abs, sqrt_exact
from .vandermonde import NodeSet, as_nodeset, build, determinant, inverse_row_scales, normalized_determinant

SATISFIED = "satisfied"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"
NO_CONCLUSION = "no conclusion"

# estimated exponents this close below the floor n*N(n+1, d-1) are snapped onto it
EXPONENT_SNAP = 1e-9
# slope of log|normalized det| against log r_k above which the determinants count as decaying
DECAY_SLOPE_TOL = 0.05


def _fmt(x):
    if x is None:
        return None
    if isinstance(x, (list, tuple)):
        return [_fmt(v) for v in x]
    if isinstance(x, (bool, str)):
        return x
    return format_scalar(x)


def _to_exact_or_float(x):
    if isinstance(x, str):
        return Fraction(x)
    if is_exact(x):
        return Fraction(x)
    return float(x)


def _exp_log(log_value: float) -> float:
    try:
        return math.exp(log_value)
    except OverflowError:
        return math.inf


def similarity_invariant(nodes, d: int, squared: bool = False) -> Scalar:
    """Det V(A) / diam(A)^(n N(n+1, d-1)), unchanged under similarities (orientation kept).

    With ``squared=True`` returns Det V(A)^2 / (diam(A)^2)^(n N(n+1, d-1)),
    exact for rational nodes even when the diameter is irrational. The plain
    form is exact when the diameter is rational and a float otherwise.
    """
    nodes = as_nodeset(nodes)
    e = vandermonde_exponent(nodes.n, d)
    diam2 = nodes.diameter2()
    if diam2 == 0:
        raise ValueError("similarity invariant needs at least two distinct points")
    det = determinant(build(nodes, d))
    if squared:
        return det * det / diam2 ** e
    if det == 0:
        return det
    if nodes.mode == EXACT:
        diam = sqrt_exact(diam2)
        if diam is not None:
            return det / diam ** e
    sign = 1.0 if det > 0 else -1.0
    return sign * _exp_log(log_abs(det) - e * 0.5 * log_abs(diam2))


@dataclass(frozen=True)
class FullnessEntry:
    k: int
    radius: Scalar
    normalized_determinant: Scalar
    row_scales: tuple | None


@dataclass(frozen=True)
class FullnessReport:
    """Per-k normalized determinants with their inverse-row certificates and a verdict.

    ``c_inf`` is the smallest |normalized determinant| seen and
    ``excess_exponent`` the fitted slope of log|normalized det| against
    log r_k (None when it cannot be fitted). The verdict is ``satisfied``
    when ``c_inf`` exceeds ``threshold`` and the determinants show no decay
    (excess at most ``DECAY_SLOPE_TOL``), ``violated`` on an exact zero or a
    sub-threshold non-increasing run, and ``inconclusive`` otherwise.
    """

    n: int
    d: int
    mode: str
    threshold: float
    exponent: int
    per_k: tuple
    c_inf: Scalar
    verdict: str
    radii_decreasing: bool
    last_center_step: float
    excess_exponent: float | None = None

    @property
    def normalized_determinants(self) -> list:
        return [e.normalized_determinant for e in self.per_k]

    def to_dict(self) -> dict:
        return {
            "kind": "fullness",
            "mode": self.mode,
            "n": self.n,
            "d": self.d,
            "threshold": _fmt(float(self.threshold)),
            "exponent": self.exponent,
            "per_k": [
                {
                    "k": e.k,
                    "r": _fmt(e.radius),
                    "normalized_determinant": _fmt(e.normalized_determinant),
                    "row_scales": _fmt(list(e.row_scales)) if e.row_scales is not None else None,
                }
                for e in self.per_k
            ],
            "c_inf": _fmt(self.c_inf),
            "excess_exponent": _fmt(self.excess_exponent),
            "radii_decreasing": self.radii_decreasing,
            "last_center_step": _fmt(self.last_center_step),
            "verdict": self.verdict,
        }


def _nonincreasing(xs) -> bool:
    return all(b <= a for a, b in zip(xs, xs[1:]))


def _check_entry(entry, n: int, d: int) -> None:
    need = dimension(n, d)
    if len(entry.nodes) != need:
        raise ValueError(f"entry k={entry.k} has {len(entry.nodes)} points, N({n},{d}) = {need} required")
    if entry.radius is None or entry.radius <= 0:
        raise ValueError(f"entry k={entry.k} needs a positive radius")


def check_fullness(seq: NodalSequence, d: int, threshold: float = 1e-6) -> FullnessReport:
    """Evaluate |Det V(A_k)| >= c r_k^(n N(n+1, d-1)) on every supplied k.

    For each k the normalized determinant Det V((A_k - a_0^k)/r_k) is the
    best constant c for that k; whenever it is nonzero the row maxima of the
    scaled inverse are recorded as the coefficient-control certificate.
    """
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    n = seq.n
    per_k = []
    for entry in seq:
        _check_entry(entry, n, d)
        nd = normalized_determinant(entry.nodes, d)
        scales = tuple(inverse_row_scales(entry.nodes, d)) if nd != 0 else None
        per_k.append(FullnessEntry(entry.k, entry.radius, nd, scales))
    mags = [abs(e.normalized_determinant) for e in per_k]
    c_inf = min(mags)
    radii = seq.radii()
    radii_decreasing = all(b < a for a, b in zip(radii, radii[1:]))
    excess = None
    if len(per_k) >= 3 and radii_decreasing and c_inf != 0:
        excess = float(np.polyfit([log_abs(r) for r in radii], [log_abs(m) for m in mags], 1)[0])
    decaying = excess is not None and excess > DECAY_SLOPE_TOL
    if c_inf > threshold and not decaying:
        verdict = SATISFIED
    elif seq.mode == EXACT and c_inf == 0:
        verdict = VIOLATED
    elif c_inf <= threshold and _nonincreasing(mags) and (mags[-1] < mags[0] or mags[-1] == 0):
        verdict = VIOLATED
    else:
        verdict = INCONCLUSIVE
    centers = seq.centers()
    step = math.sqrt(float(sum((a - b) ** 2 for a, b in zip(centers[-1], centers[-2])))) if len(centers) > 1 else 0.0
    return FullnessReport(
        n=n,
        d=d,
        mode=seq.mode,
        threshold=threshold,
        exponent=vandermonde_exponent(n, d),
        per_k=tuple(per_k),
        c_inf=c_inf,
        verdict=verdict,
        radii_decreasing=radii_decreasing,
        last_center_step=step,
        excess_exponent=excess,
    )


class ScalingFit(NamedTuple):
    e: float
    c: float
    residual: float


def log_determinants(seq: NodalSequence, d: int) -> list[float]:
    """log |Det V(A_k)| for each k; exact determinants in exact mode, the normalized route in float mode."""
    n = seq.n
    expo = vandermonde_exponent(n, d)
    out = []
    for entry in seq:
        _check_entry(entry, n, d)
        if entry.nodes.mode == EXACT:
            det = determinant(build(entry.nodes, d))
            if det == 0:
                raise ValueError(f"Det V(A_k) vanishes at k={entry.k}; the decay exponent is undefined")
            out.append(log_abs(det))
        else:
            nd = normalized_determinant(entry.nodes, d)
            if nd == 0:
                raise ValueError(f"Det V(A_k) vanishes at k={entry.k}; the decay exponent is undefined")
            out.append(log_abs(nd) + expo * log_abs(entry.radius))
    return out


def estimate_scaling_exponent(seq: NodalSequence, d: int) -> ScalingFit:
    """Least-squares slope e of log|Det V(A_k)| against log r_k.

    ``c`` is the largest constant with |Det V(A_k)| >= c r_k^e on every k and
    ``residual`` the largest absolute deviation from the fitted line (log space).
    """
    if len(seq) < 3:
        raise ValueError("need at least 3 entries to fit a scaling exponent")
    radii = seq.radii()
    if not all(b < a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly decreasing")
    logr = np.array([log_abs(r) for r in radii])
    logdet = np.array(log_determinants(seq, d))
    e, b = np.polyfit(logr, logdet, 1)
    residual = float(np.max(np.abs(logdet - (e * logr + b))))
    c = _exp_log(float(np.min(logdet - e * logr)))
    return ScalingFit(float(e), c, residual)


def flatness_ratios(seq: NodalSequence, values: Sequence[Sequence], p) -> list[Scalar]:
    """S_k = r_k^(-p) max |f(x)| over A_k. Exact when p is an integer and the data are rational."""
    out = []
    exact_p = is_exact(p) and Fraction(p).denominator == 1
    for entry, vals in zip(seq, values):
        if len(vals) != len(entry.nodes):
            raise ValueError(f"entry k={entry.k}: {len(vals)} values for {len(entry.nodes)} nodes")
        top = max(abs(v) for v in vals)
        r = entry.radius
        if exact_p and is_exact(r) and all(is_exact(v) for v in vals):
            out.append(Fraction(top) / Fraction(r) ** int(p))
        elif top == 0:
            out.append(0.0)
        else:
            out.append(_exp_log(log_abs(top) - float(p) * log_abs(r)))
    return out


@dataclass(frozen=True)
class FlatnessReport:
    """Flatness exponent test: the ratios S_k, the order m and the verdict.

    ``verdict`` is ``"<j>-flat"`` or ``"no conclusion"``; ``case`` records
    which branch produced it ("i" for integral m with S_k -> 0, "ii" for
    fractional m with S_k bounded).
    """

    n: int
    d: int
    mode: str
    p: Scalar
    e: Scalar
    e_source: str
    exponent_floor: int
    c: float
    m: Scalar
    S_list: tuple
    verdict: str
    case: str | None
    flat_order: int | None
    tail_threshold: float
    tail_length: int
    tail_max: float
    head_max: float | None
    tail_nonincreasing: bool
    fit_residual: float | None = None

    def to_dict(self) -> dict:
        return {
            "kind": "flatness",
            "mode": self.mode,
            "n": self.n,
            "d": self.d,
            "p": _fmt(self.p),
            "e": _fmt(self.e),
            "e_source": self.e_source,
            "exponent_floor": self.exponent_floor,
            "c": _fmt(self.c),
            "m": _fmt(self.m),
            "S_list": _fmt(list(self.S_list)),
            "tail_threshold": _fmt(float(self.tail_threshold)),
            "tail_length": self.tail_length,
            "tail_max": _fmt(self.tail_max),
            "head_max": _fmt(self.head_max),
            "tail_nonincreasing": self.tail_nonincreasing,
            "fit_residual": _fmt(self.fit_residual),
            "case": self.case,
            "flat_order": self.flat_order,
            "verdict": self.verdict,
        }


def _is_integer(x) -> bool:
    if is_exact(x):
        return Fraction(x).denominator == 1
    return float(x).is_integer()


def flatness_order(
    seq: NodalSequence,
    values: Sequence[Sequence] | None,
    p,
    d: int,
    e=None,
    tail_threshold: float = 1e-6,
) -> FlatnessReport:
    """Decide how flat f is at the limit point from its values on the A_k.

    With m = p - (e - n N(n+1, d-1)):
      * m integral: "m-flat" when the last ceil(K/3) ratios S_k are
        non-increasing and all below ``tail_threshold`` (finite proxy of S_k -> 0);
      * m fractional: "floor(m)-flat" when every S_k is below
        ``1/tail_threshold`` and the tail maximum does not exceed the maximum
        before it (finite proxy of boundedness).
    Otherwise the verdict is "no conclusion". ``values`` defaults to the
    values stored on the sequence entries; ``e`` defaults to the fitted
    exponent of ``estimate_scaling_exponent``.
    """
    n = seq.n
    floor_e = vandermonde_exponent(n, d)
    p = _to_exact_or_float(p)
    if p <= 0:
        raise ValueError("p must be positive")
    if p > d:
        raise ValueError(f"p = {p} exceeds the smoothness order d = {d}")
    if tail_threshold <= 0:
        raise ValueError("tail_threshold must be positive")
    if values is None:
        values = [e_.values for e_ in seq]
        if any(v is None for v in values):
            raise ValueError("no values supplied and the sequence carries none")
    values = [coerce_all(v, infer_mode(v)) for v in values]
    if len(values) != len(seq):
        raise ValueError(f"{len(values)} value lists for {len(seq)} entries")

    fit_residual = None
    if e is None:
        fit = estimate_scaling_exponent(seq, d)
        e_val, e_source, fit_residual = fit.e, "estimated", fit.residual
        if e_val < floor_e:
            if floor_e - e_val <= EXPONENT_SNAP * max(1, floor_e):
                e_val = Fraction(floor_e)
            else:
                raise ValueError(
                    f"fitted exponent e = {e_val} is below the floor n*N(n+1,d-1) = {floor_e}"
                )
    else:
        e_val, e_source = _to_exact_or_float(e), "supplied"
        if e_val < floor_e:
            raise ValueError(
                f"e = {e_val} is below the floor n*N(n+1,d-1) = {floor_e}; "
                "no node sequence can satisfy the determinant bound with a smaller exponent"
            )

    logdet = log_determinants(seq, d)
    c = _exp_log(min(ld - float(e_val) * log_abs(entry.radius) for ld, entry in zip(logdet, seq)))

    if is_exact(p) and is_exact(e_val):
        m = Fraction(p) - (Fraction(e_val) - floor_e)
    else:
        m = float(p) - (float(e_val) - floor_e)

    S = flatness_ratios(seq, values, p)
    K = len(S)
    tail_len = max(1, math.ceil(K / 3))
    tail = S[-tail_len:]
    head = S[:-tail_len]
    tail_max = float(max(tail))
    head_max = float(max(head)) if head else None
    tail_noninc = _nonincreasing(tail)

    verdict, case, order = NO_CONCLUSION, None, None
    if _is_integer(m):
        mi = int(m)
        if 0 <= mi <= d and tail_noninc and tail_max < tail_threshold:
            verdict, case, order = f"{mi}-flat", "i", mi
    else:
        mf = math.floor(m)
        bounded = (
            head_max is not None
            and float(max(S)) < 1 / tail_threshold
            and tail_max <= head_max
        )
        if 0 <= mf <= d and bounded:
            verdict, case, order = f"{mf}-flat", "ii", mf

    return FlatnessReport(
        n=n,
        d=d,
        mode=seq.mode,
        p=p,
        e=e_val,
        e_source=e_source,
        exponent_floor=floor_e,
        c=c,
        m=m,
        S_list=tuple(S),
        verdict=verdict,
        case=case,
        flat_order=order,
        tail_threshold=tail_threshold,
        tail_length=tail_len,
        tail_max=tail_max,
        head_max=head_max,
        tail_nonincreasing=tail_noninc,
        fit_residual=fit_residual,
    )


def factored_bound(seq: NodalSequence, values: Sequence[Sequence], p, q, s_list: Sequence) -> list[float]:
    """T_k = (s_k^q / r_k^p) max |f(x)| / |x|^q over A_k, an upper bound for S_k.

    |x| is the Euclidean norm. Requires every node of A_k inside the closed
    ball of radius s_k about the origin and none at the origin.
    """
    p, q = float(p), float(q)
    if q <= 0:
        raise ValueError("q must be positive")
    if len(s_list) != len(seq) or len(values) != len(seq):
        raise ValueError("need one outer radius and one value list per entry")
    out = []
    for entry, vals, s in zip(seq, values, s_list):
        if len(vals) != len(entry.nodes):
            raise ValueError(f"entry k={entry.k}: {len(vals)} values for {len(entry.nodes)} nodes")
        s2 = s * s
        slack = 0 if is_exact(s2) else 1e-12 * s2
        best = 0.0
        for x, v in zip(entry.nodes.points, vals):
            x2 = sum(c * c for c in x)
            if x2 == 0:
                raise ValueError(f"entry k={entry.k} has a node at the origin")
            if x2 > s2 + slack:
                raise ValueError(f"entry k={entry.k}: node {x} lies outside the ball of radius {s}")
            if v != 0:
                best = max(best, _exp_log(log_abs(v) - 0.5 * q * log_abs(x2)))
        if best == 0:
            out.append(0.0)
        else:
            out.append(best * _exp_log(q * log_abs(s) - p * log_abs(entry.radius)))
    return out


@dataclass(frozen=True)
class JetEstimate:
    """Scaled Taylor coefficients at ``center``: entry i estimates f^(p_i)(center) / p_i!."""

    center: tuple
    d: int
    coefficients: tuple

    @property
    def n(self) -> int:
        return len(self.center)

    def coefficient(self, index) -> Scalar:
        return self.coefficients[enumerate_indices(self.n, self.d).position(index)]

    def derivative(self, index) -> Scalar:
        """The estimated partial derivative f^(p)(center) itself."""
        idx = enumerate_indices(self.n, self.d)
        pos = idx.position(index)
        return self.coefficients[pos] * idx[pos].factorial()

    def __call__(self, point) -> Scalar:
        shifted = tuple(x - c for x, c in zip(point, self.center))
        total = 0
        for idx, c in zip(enumerate_indices(self.n, self.d), self.coefficients):
            if c:
                total = total + c * monomial_eval(shifted, idx)
        return total

    def to_dict(self) -> dict:
        return {
            "kind": "jet",
            "center": _fmt(list(self.center)),
            "d": self.d,
            "indices": [list(p.exponents) for p in enumerate_indices(self.n, self.d)],
            "coefficients": _fmt(list(self.coefficients)),
        }


def estimate_jet(nodes, values: Sequence, d: int) -> JetEstimate:
    """Solve V(A - a_0) c = values; exact for polynomials of degree <= d."""
    nodes = as_nodeset(nodes)
    if len(values) != len(nodes):
        raise ValueError(f"{len(nodes)} nodes but {len(values)} values")
    mode = nodes.mode if infer_mode(values) == EXACT else FLOAT
    if nodes.mode != mode:
        nodes = nodes.with_mode(mode)
    values = coerce_all(values, mode)
    v = build(nodes.centered(), d)
    try:
        coeffs = linalg.solve(v.entries, values)
    except np.linalg.LinAlgError:
        raise UnisolvenceError("jet system is singular: Det V(A - a_0) = 0", determinant(v)) from None
    return JetEstimate(nodes.center, d, tuple(coeffs))


__all__ = [
    "FullnessEntry",
    "FullnessReport",
    "FlatnessReport",
    "JetEstimate",
    "ScalingFit",
    "SATISFIED",
    "VIOLATED",
    "INCONCLUSIVE",
    "NO_CONCLUSION",
    "similarity_invariant",
    "check_fullness",
    "log_determinants",
    "estimate_scaling_exponent",
    "flatness_ratios",
    "flatness_order",
    "factored_bound",
    "estimate_jet",
]
