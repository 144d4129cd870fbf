"""Exact rational linear algebra on small integer matrices."""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp


def rref(rows: Sequence[Sequence[int]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    m = [[Fraction(v) for v in r] for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence[int]], ncols: int) -> int:
    return len(rref(rows, ncols)[1]) if rows else 0


def nullspace(rows: Sequence[Sequence[int]], ncols: int) -> list[list[Fraction]]:
    """Basis of {x : rows @ x = 0} over the rationals."""
    red, pivots = rref(rows, ncols) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[fc]
        basis.append(v)
    return basis


def primitive(v: Sequence[Fraction]) -> tuple[int, ...]:
    """Smallest integer multiple of ``v`` with gcd 1 (sign preserved)."""
    den = 1
    for x in v:
        den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    return tuple(x // g for x in ints) if g else tuple(ints)


def lexmin_positive(
    eq_rows: Sequence[Sequence[int]],
    ncols: int,
    ge_rows: Sequence[Sequence[int]] = (),
) -> tuple[int, ...] | None:
    """Lexicographically smallest integer x >= 1 with eq_rows @ x = 0 and ge_rows @ x >= 1.

    The lex-min solution is automatically primitive: dividing by a common
    factor would give a lex-smaller solution.
    """
    eq_rows = [list(r) for r in eq_rows if any(r)]
    basis = nullspace(eq_rows, ncols)
    if not basis:
        return None
    if len(basis) == 1 and not ge_rows:
        v = primitive(basis[0])
        if all(x < 0 for x in v):
            v = tuple(-x for x in v)
        return v if all(x > 0 for x in v) else None

    cons = []
    if eq_rows:
        A = np.array(eq_rows, dtype=float)
        cons.append(LinearConstraint(A, 0.0, 0.0))
    if ge_rows:
        G = np.array(ge_rows, dtype=float)
        cons.append(LinearConstraint(G, 1.0, np.inf))
    lb = np.ones(ncols)
    ub = np.full(ncols, np.inf)
    fixed: list[int] = []
    for k in range(ncols):
        c = np.zeros(ncols)
        c[k] = 1.0
        lo, hi = lb.copy(), ub.copy()
        for j, val in enumerate(fixed):
            lo[j] = hi[j] = val
        res = milp(c, constraints=cons, integrality=np.ones(ncols), bounds=Bounds(lo, hi))
        if res.status != 0 or res.x is None:
            return None
        fixed.append(int(round(res.x[k])))
    x = tuple(fixed)
    ok = all(sum(a * b for a, b in zip(r, x)) == 0 for r in eq_rows)
    ok = ok and all(sum(a * b for a, b in zip(r, x)) >= 1 for r in ge_rows)
    return x if ok and min(x) >= 1 else None
