"""Exact sparse mixed polynomials f(z, z̄) = Σ c_{νμ} z^ν z̄^μ.

Coefficients are Gaussian rationals, so every symbolic identity (Euler
residuals, pull-backs, conjugation) is checked with exact zero tests.
Floating point only enters in :meth:`MixedPolynomial.evaluate`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

__all__ = [
    "GaussianRational",
    "MixedTerm",
    "MixedPolynomial",
    "DegenerateInputError",
    "wirtinger_dz",
    "wirtinger_dzbar",
    "conjugate",
    "real_part",
    "imag_part",
    "evaluate",
    "is_real_valued",
    "is_holomorphic",
]

Key = tuple[tuple[int, ...], tuple[int, ...]]


class DegenerateInputError(ValueError):
    """Raised when an analysis receives the zero polynomial."""


@dataclass(frozen=True, slots=True)
class GaussianRational:
    """Exact complex number ``re + i*im`` with rational parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        # Fraction already keeps gcd(num, den) = 1 and den > 0
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def coerce(cls, value: object) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Rational)):
            return cls(Fraction(value))
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        if isinstance(value, float):
            return cls(Fraction(value))
        raise TypeError(f"cannot interpret {value!r} as a Gaussian rational")

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __add__(self, other: object) -> "GaussianRational":
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other: object) -> "GaussianRational":
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other: object) -> "GaussianRational":
        return GaussianRational.coerce(other) - self

    def __mul__(self, other: object) -> "GaussianRational":
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> "GaussianRational":
        o = GaussianRational.coerce(other)
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        num = self * o.conjugate()
        return GaussianRational(num.re / den, num.im / den)

    def __eq__(self, other: object) -> bool:
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __repr__(self) -> str:
        return f"GaussianRational({self.re}, {self.im})"


ZERO = GaussianRational()
ONE = GaussianRational(Fraction(1))


@dataclass(frozen=True, slots=True)
class MixedTerm:
    coeff: GaussianRational
    nu: tuple[int, ...]
    mu: tuple[int, ...]

    @property
    def support(self) -> tuple[int, ...]:
        """Radial support point ν + μ."""
        return tuple(a + b for a, b in zip(self.nu, self.mu))

    @property
    def polar(self) -> tuple[int, ...]:
        """Polar exponent ν - μ."""
        return tuple(a - b for a, b in zip(self.nu, self.mu))


class MixedPolynomial:
    """Immutable sparse mixed polynomial in ``n`` complex variables.

    ``terms`` maps ``(nu, mu)`` exponent tuples to non-zero Gaussian rational
    coefficients; keys are kept in descending lexicographic order so iteration and
    serialization are deterministic.

    >>> p = MixedPolynomial.variable(2, 0) ** 2 * MixedPolynomial.conj_variable(2, 0)
    >>> p.to_text()
    'z1^2*~z1'
    """

    __slots__ = ("_n", "_terms", "_hash", "_numeric")

    def __init__(self, n: int, terms: Mapping[Key, object] | Iterable[tuple[Key, object]] = ()):
        if n < 1:
            raise ValueError("dimension must be at least 1")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Key, GaussianRational] = {}
        for (nu, mu), c in items:
            nu, mu = tuple(int(e) for e in nu), tuple(int(e) for e in mu)
            if len(nu) != n or len(mu) != n:
                raise ValueError(f"exponent vectors must have length {n}")
            if min(nu + mu) < 0:
                raise ValueError("negative exponent")
            acc[(nu, mu)] = acc.get((nu, mu), ZERO) + GaussianRational.coerce(c)
        self._n = n
        self._terms = {k: acc[k] for k in sorted(acc, reverse=True) if acc[k]}
        self._hash = None
        self._numeric = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, n: int) -> "MixedPolynomial":
        return cls(n)

    @classmethod
    def constant(cls, n: int, c: object) -> "MixedPolynomial":
        return cls(n, {((0,) * n, (0,) * n): c})

    @classmethod
    def monomial(cls, nu: Sequence[int], mu: Sequence[int], c: object = 1) -> "MixedPolynomial":
        return cls(len(nu), {(tuple(nu), tuple(mu)): c})

    @classmethod
    def variable(cls, n: int, j: int) -> "MixedPolynomial":
        """z_{j+1} (0-based index)."""
        e = [0] * n
        e[j] = 1
        return cls.monomial(e, [0] * n)

    @classmethod
    def conj_variable(cls, n: int, j: int) -> "MixedPolynomial":
        e = [0] * n
        e[j] = 1
        return cls.monomial([0] * n, e)

    # -- container protocol ----------------------------------------------
    @property
    def n(self) -> int:
        return self._n

    @property
    def terms(self) -> Mapping[Key, GaussianRational]:
        return MappingProxyType(self._terms)

    def __iter__(self) -> Iterator[MixedTerm]:
        for (nu, mu), c in self._terms.items():
            yield MixedTerm(c, nu, mu)

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MixedPolynomial):
            return NotImplemented
        return self._n == other._n and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._n, tuple(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"MixedPolynomial(n={self._n}, {self.to_text()!r})"

    def __str__(self) -> str:
        return self.to_text()

    # -- arithmetic ---------------------------------------------------------
    def _lift(self, other: object) -> "MixedPolynomial":
        if isinstance(other, MixedPolynomial):
            if other._n != self._n:
                raise ValueError(f"dimension mismatch: {self._n} vs {other._n}")
            return other
        return MixedPolynomial.constant(self._n, other)

    def __add__(self, other: object) -> "MixedPolynomial":
        o = self._lift(other)
        return MixedPolynomial(self._n, list(self._terms.items()) + list(o._terms.items()))

    __radd__ = __add__

    def __neg__(self) -> "MixedPolynomial":
        return MixedPolynomial(self._n, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other: object) -> "MixedPolynomial":
        return self + (-self._lift(other))

    def __rsub__(self, other: object) -> "MixedPolynomial":
        return self._lift(other) - self

    def __mul__(self, other: object) -> "MixedPolynomial":
        o = self._lift(other)
        out = []
        for (nu1, mu1), c1 in self._terms.items():
            for (nu2, mu2), c2 in o._terms.items():
                key = (
                    tuple(a + b for a, b in zip(nu1, nu2)),
                    tuple(a + b for a, b in zip(mu1, mu2)),
                )
                out.append((key, c1 * c2))
        return MixedPolynomial(self._n, out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "MixedPolynomial":
        if not isinstance(e, int) or e < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = MixedPolynomial.constant(self._n, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def scale(self, c: object) -> "MixedPolynomial":
        c = GaussianRational.coerce(c)
        return MixedPolynomial(self._n, {k: v * c for k, v in self._terms.items()})

    # -- calculus -------------------------------------------------------------
    def dz(self, j: int) -> "MixedPolynomial":
        """Wirtinger derivative ∂/∂z_{j+1} (0-based ``j``)."""
        self._check_index(j)
        out = []
        for (nu, mu), c in self._terms.items():
            if nu[j]:
                nu2 = nu[:j] + (nu[j] - 1,) + nu[j + 1 :]
                out.append(((nu2, mu), c * nu[j]))
        return MixedPolynomial(self._n, out)

    def dzbar(self, j: int) -> "MixedPolynomial":
        """Wirtinger derivative ∂/∂z̄_{j+1} (0-based ``j``)."""
        self._check_index(j)
        out = []
        for (nu, mu), c in self._terms.items():
            if mu[j]:
                mu2 = mu[:j] + (mu[j] - 1,) + mu[j + 1 :]
                out.append(((nu, mu2), c * mu[j]))
        return MixedPolynomial(self._n, out)

    def _check_index(self, j: int) -> None:
        if not 0 <= j < self._n:
            raise IndexError(f"variable index {j + 1} out of range 1..{self._n}")

    def conjugate(self) -> "MixedPolynomial":
        return MixedPolynomial(self._n, {(mu, nu): c.conjugate() for (nu, mu), c in self._terms.items()})

    def real_part(self) -> "MixedPolynomial":
        return (self + self.conjugate()).scale(Fraction(1, 2))

    def imag_part(self) -> "MixedPolynomial":
        # (f - f̄) / (2i) = -i/2 (f - f̄)
        return (self - self.conjugate()).scale(GaussianRational(0, Fraction(-1, 2)))

    def is_real_valued(self) -> bool:
        return self == self.conjugate()

    def is_holomorphic(self) -> bool:
        return all(not any(mu) for (_, mu) in self._terms)

    # -- evaluation -----------------------------------------------------------
    def evaluate(self, pt: Sequence[complex], conj_pt: Sequence[complex] | None = None) -> complex:
        """Σ c z^ν z̄^μ at ``pt``.

        ``conj_pt`` substitutes an independent value for z̄ (polarised
        evaluation); by default it is the complex conjugate of ``pt``.
        """
        pt = [complex(v) for v in pt]
        if len(pt) != self._n:
            raise ValueError(f"point has dimension {len(pt)}, polynomial has {self._n}")
        cpt = [v.conjugate() for v in pt] if conj_pt is None else [complex(v) for v in conj_pt]
        total = 0j
        for (nu, mu), c in self._terms.items():
            m = complex(c)
            for j in range(self._n):
                if nu[j]:
                    m *= pt[j] ** nu[j]
                if mu[j]:
                    m *= cpt[j] ** mu[j]
            total += m
        return total

    def evaluate_exact(self, pt: Sequence[object]) -> GaussianRational:
        """Exact value at a point with Gaussian rational coordinates."""
        pt = [GaussianRational.coerce(v) for v in pt]
        if len(pt) != self._n:
            raise ValueError(f"point has dimension {len(pt)}, polynomial has {self._n}")
        cpt = [v.conjugate() for v in pt]
        total = ZERO
        for (nu, mu), c in self._terms.items():
            m = c
            for j in range(self._n):
                for _ in range(nu[j]):
                    m = m * pt[j]
                for _ in range(mu[j]):
                    m = m * cpt[j]
            total = total + m
        return total

    def numeric(self):
        """Array form ``(nu, mu, coef)`` consumed by the numeric kernels."""
        if self._numeric is None:
            from .kernels import NumericPoly

            self._numeric = NumericPoly.from_terms(self._n, self._terms)
        return self._numeric

    # -- text -------------------------------------------------------------------
    def to_text(self, var: str = "z") -> str:
        from .grammar import serialize

        return serialize(self, var=var)


def wirtinger_dz(p: MixedPolynomial, j: int) -> MixedPolynomial:
    """∂p/∂z_j with 1-based ``j``."""
    return p.dz(j - 1)


def wirtinger_dzbar(p: MixedPolynomial, j: int) -> MixedPolynomial:
    """∂p/∂z̄_j with 1-based ``j``."""
    return p.dzbar(j - 1)


def conjugate(p: MixedPolynomial) -> MixedPolynomial:
    return p.conjugate()


def real_part(p: MixedPolynomial) -> MixedPolynomial:
    return p.real_part()


def imag_part(p: MixedPolynomial) -> MixedPolynomial:
    return p.imag_part()


def evaluate(p: MixedPolynomial, pt: Sequence[complex]) -> complex:
    return p.evaluate(pt)


def is_real_valued(p: MixedPolynomial) -> bool:
    return p.is_real_valued()


def is_holomorphic(p: MixedPolynomial) -> bool:
    return p.is_holomorphic()


def as_point(pt: Sequence[complex] | np.ndarray, n: int) -> np.ndarray:
    z = np.asarray(pt, dtype=np.complex128).reshape(-1)
    if z.shape[0] != n:
        raise ValueError(f"point has dimension {z.shape[0]}, expected {n}")
    if not np.all(np.isfinite(z)):
        raise ValueError("point has non-finite coordinates")
    return z
