"""Differential forms at a single point of ℝ^{2n} = ℂ^n.

Coordinates are ordered (x_1, y_1, …, x_n, y_n). A k-form is stored by its
components on increasing index tuples; :meth:`FormAtPoint.tensor` expands it
to the full antisymmetric array when needed.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

__all__ = ["FormAtPoint", "permutation_sign"]


def permutation_sign(seq) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@dataclass(frozen=True)
class FormAtPoint:
    dim: int  # real dimension 2n
    degree: int
    coeffs: dict = field(default_factory=dict)  # increasing index tuple -> scalar

    @classmethod
    def one_form(cls, components) -> "FormAtPoint":
        comps = np.asarray(components)
        return cls(comps.shape[0], 1, {(i,): comps[i] for i in range(comps.shape[0]) if comps[i] != 0})

    @classmethod
    def from_pairs(cls, dim: int, degree: int, items) -> "FormAtPoint":
        """Build from (index tuple, value) pairs in any order."""
        out: dict = {}
        for idx, val in items:
            if len(set(idx)) < len(idx):
                continue
            key = tuple(sorted(idx))
            out[key] = out.get(key, 0) + permutation_sign(idx) * val
        return cls(dim, degree, {k: v for k, v in out.items() if v != 0})

    def wedge(self, other: "FormAtPoint") -> "FormAtPoint":
        if self.dim != other.dim:
            raise ValueError("forms live in different dimensions")
        if self.degree + other.degree > self.dim:
            return FormAtPoint(self.dim, self.degree + other.degree)
        items = []
        for I, a in self.coeffs.items():
            for J, b in other.coeffs.items():
                if set(I).isdisjoint(J):
                    items.append((I + J, a * b))
        return FormAtPoint.from_pairs(self.dim, self.degree + other.degree, items)

    __xor__ = wedge

    def __add__(self, other: "FormAtPoint") -> "FormAtPoint":
        if (self.dim, self.degree) != (other.dim, other.degree):
            raise ValueError("can only add forms of equal degree")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return FormAtPoint(self.dim, self.degree, out)

    def scale(self, c) -> "FormAtPoint":
        return FormAtPoint(self.dim, self.degree, {k: c * v for k, v in self.coeffs.items()})

    def __call__(self, *vectors):
        """Evaluate on ``degree`` vectors (real or complex components)."""
        if len(vectors) != self.degree:
            raise ValueError(f"{self.degree}-form needs {self.degree} vectors")
        V = np.array(vectors)
        total = 0
        for I, c in self.coeffs.items():
            total = total + c * np.linalg.det(V[:, list(I)]) if self.degree > 0 else c
        return total

    def top_coefficient(self):
        """Coefficient against dx_1∧dy_1∧…∧dx_n∧dy_n."""
        if self.degree != self.dim:
            raise ValueError("not a top-degree form")
        return self.coeffs.get(tuple(range(self.dim)), 0)

    def tensor(self) -> np.ndarray:
        """Dense antisymmetric array T with T[i_1..i_k] = form(e_{i_1}, …, e_{i_k})."""
        T = np.zeros((self.dim,) * self.degree, dtype=np.result_type(*self.coeffs.values(), float) if self.coeffs else float)
        for I, c in self.coeffs.items():
            for perm in itertools.permutations(range(self.degree)):
                T[tuple(I[p] for p in perm)] = permutation_sign(perm) * c
        return T
