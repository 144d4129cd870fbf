"""Mixed cyclic coverings φ_{a,b}(w) = (w_1^{a_1} w̄_1^{b_1}, …, w_n^{a_n} w̄_n^{b_n})."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Sequence

import numpy as np

from ._linalg import primitive
from .mixed_poly import MixedPolynomial

__all__ = [
    "CoveringSpec",
    "CoveringError",
    "pullback",
    "transform_weights",
    "TransformedWeights",
    "covering_degree",
]


class CoveringError(ValueError):
    pass


@dataclass(frozen=True)
class CoveringSpec:
    a: tuple[int, ...]
    b: tuple[int, ...]

    def __post_init__(self) -> None:
        a = tuple(int(v) for v in self.a)
        b = tuple(int(v) for v in self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if len(a) != len(b) or not a:
            raise CoveringError("a and b must be non-empty and of equal length")
        if min(a + b) < 0:
            raise CoveringError("a and b must be non-negative")
        if any(x == y for x, y in zip(a, b)):
            raise CoveringError("a_j = b_j is not a covering (division by a_j - b_j)")
        signs = {1 if x > y else -1 for x, y in zip(a, b)}
        if len(signs) > 1:
            raise CoveringError("mixed orientation: need a_j > b_j for all j or b_j > a_j for all j")

    @classmethod
    def homogeneous_spec(cls, n: int, a: int, b: int) -> "CoveringSpec":
        return cls((a,) * n, (b,) * n)

    @classmethod
    def from_args(cls, n: int, a: Sequence[int] | int, b: Sequence[int] | int) -> "CoveringSpec":
        a = (a,) * n if isinstance(a, int) else tuple(a)
        b = (b,) * n if isinstance(b, int) else tuple(b)
        if len(a) != n or len(b) != n:
            raise CoveringError(f"covering vectors must have length {n}")
        return cls(a, b)

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def homogeneous(self) -> bool:
        return len(set(self.a)) == 1 and len(set(self.b)) == 1

    @property
    def orientation(self) -> int:
        """+1 in the a ≫ b regime, -1 in the anti-holomorphic regime b ≫ a."""
        return 1 if self.a[0] > self.b[0] else -1

    def apply(self, W) -> np.ndarray:
        """φ(w) for the rows of ``W`` (floating point)."""
        W = np.asarray(W, dtype=np.complex128)
        a = np.array(self.a)
        b = np.array(self.b)
        return W**a * np.conj(W) ** b

    def to_dict(self) -> dict:
        return {"a": list(self.a), "b": list(self.b), "homogeneous": self.homogeneous, "orientation": self.orientation}


def pullback(p: MixedPolynomial, spec: CoveringSpec) -> MixedPolynomial:
    """Exact substitution z_j ↦ w_j^{a_j} w̄_j^{b_j}, z̄_j ↦ w̄_j^{a_j} w_j^{b_j}."""
    if spec.n != p.n:
        raise CoveringError(f"covering has dimension {spec.n}, polynomial has {p.n}")
    out = []
    for (nu, mu), c in p.terms.items():
        nu2 = tuple(a * x + b * y for a, b, x, y in zip(spec.a, spec.b, nu, mu))
        mu2 = tuple(b * x + a * y for a, b, x, y in zip(spec.a, spec.b, nu, mu))
        out.append(((nu2, mu2), c))
    return MixedPolynomial(p.n, out)


@dataclass(frozen=True)
class TransformedWeights:
    radial: tuple[Fraction, ...]  # q̂, pulled-back terms have radial degree 1
    polar: tuple[Fraction, ...] | None  # ŝ, pulled-back terms have polar degree 1
    radial_cleared: tuple[int, ...]
    radial_degree: int
    polar_cleared: tuple[int, ...] | None
    polar_degree: int | None


def _clear(v: Sequence[Fraction]) -> tuple[tuple[int, ...], int]:
    """Primitive positive integer vector W and degree m with W = m·v."""
    sign = -1 if v[0] < 0 else 1
    W = primitive([sign * x for x in v])
    m = Fraction(W[0]) / v[0]
    return W, int(m)


def transform_weights(
    Q: Sequence[int],
    d_r: int,
    S: Sequence[int],
    d_p: int,
    spec: CoveringSpec,
) -> TransformedWeights:
    """Normalised weights of the pull-back: q̂_j = (q_j/d_r)/(a_j+b_j), ŝ_j = (s_j/d_p)/(a_j-b_j).

    The cleared versions are primitive positive integer weights together with
    the matching degree. In the b ≫ a regime the polar degree comes out
    negative while the cleared weight stays positive.
    """
    n = spec.n
    if len(Q) != n or len(S) != n:
        raise CoveringError("weight length does not match covering dimension")
    if min(Q) < 1 or min(S) < 1:
        raise CoveringError("weights must be positive")
    if d_r == 0:
        raise CoveringError("radial degree must be non-zero")
    qh = tuple(Fraction(q, d_r) / (a + b) for q, a, b in zip(Q, spec.a, spec.b))
    Qc, m_r = _clear(qh)
    if d_p == 0:
        return TransformedWeights(qh, None, Qc, m_r, None, None)
    sh = tuple(Fraction(s, d_p) / (a - b) for s, a, b in zip(S, spec.a, spec.b))
    Sc, m_p = _clear(sh)
    return TransformedWeights(qh, sh, Qc, m_r, Sc, m_p)


def covering_degree(spec: CoveringSpec) -> int:
    return prod(abs(a - b) for a, b in zip(spec.a, spec.b))
