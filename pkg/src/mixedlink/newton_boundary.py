"""Newton boundary, face functions and face-type classification.

Faces are taken on the radial support ν+μ; the (ν, μ) splits are kept as
witnesses because the polar classification of a face needs ν-μ.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from math import gcd
from typing import Sequence

import numpy as np

from . import _linalg, kernels
from .homogeneity import detect_weights, polar_degree, radial_degree
from .mixed_poly import DegenerateInputError, MixedPolynomial, MixedTerm

__all__ = [
    "FaceType",
    "SupportPoint",
    "Face",
    "ConvenienceReport",
    "NewtonBoundaryReport",
    "NotConvenientError",
    "support_points",
    "face_function",
    "is_convenient",
    "top_faces",
    "classify_face_type",
    "ProbeReport",
    "nondegeneracy_probe",
]


class NotConvenientError(ValueError):
    def __init__(self, missing: Sequence[int]):
        self.missing = tuple(missing)
        axes = ",".join(str(j) for j in self.missing)
        super().__init__(f"not convenient: axes {axes} missing")


class FaceType(enum.IntEnum):
    # ordered from weakest to strongest
    NEITHER = 0
    POLAR_POSITIVE = 1
    STRONGLY_POLAR_POSITIVE = 2

    @property
    def label(self) -> str:
        return {0: "Neither", 1: "PolarPositive", 2: "StronglyPolarPositive"}[self.value]


@dataclass(frozen=True)
class SupportPoint:
    point: tuple[int, ...]
    witnesses: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]


@dataclass(frozen=True)
class Face:
    normal: tuple[int, ...]
    dimension: int
    face_poly: MixedPolynomial
    classification: FaceType
    polar_witness: tuple[int, ...] | None = None  # P' with pdeg_{P'} f_P > 0
    polar_degree: int | None = None

    def to_dict(self) -> dict:
        return {
            "normal": list(self.normal),
            "dimension": self.dimension,
            "face_poly": self.face_poly.to_text(),
            "classification": self.classification.label,
            "polar_witness": None if self.polar_witness is None else list(self.polar_witness),
            "polar_degree": self.polar_degree,
        }


@dataclass(frozen=True)
class ConvenienceReport:
    convenient: bool
    witnesses: dict[int, MixedTerm | None]  # 1-based axis -> pure term on that axis

    @property
    def missing(self) -> list[int]:
        return [j for j, w in self.witnesses.items() if w is None]

    def __bool__(self) -> bool:
        return self.convenient


@dataclass(frozen=True)
class NewtonBoundaryReport:
    convenient: bool
    top_faces: tuple[Face, ...]
    overall: FaceType
    subface_checks: int = 0
    subface_failures: tuple[tuple[int, ...], ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "convenient": self.convenient,
            "overall": self.overall.label,
            "top_faces": [f.to_dict() for f in self.top_faces],
            "subface_checks": self.subface_checks,
            "subface_failures": [list(p) for p in self.subface_failures],
        }


def support_points(p: MixedPolynomial) -> list[SupportPoint]:
    groups: dict[tuple[int, ...], list] = {}
    for t in p:
        groups.setdefault(t.support, []).append((t.nu, t.mu))
    return [SupportPoint(k, tuple(v)) for k, v in sorted(groups.items())]


def face_function(p: MixedPolynomial, P: Sequence[int]) -> MixedPolynomial:
    """Sub-polynomial of the terms of minimal radial P-degree."""
    if p.is_zero():
        raise DegenerateInputError("face function of the zero polynomial")
    if len(P) != p.n:
        raise ValueError("weight length does not match dimension")
    if min(P) < 1:
        raise ValueError("face weights must be strictly positive")
    degs = {key: radial_degree(MixedTerm(c, *key), P) for key, c in p.terms.items()}
    d = min(degs.values())
    return MixedPolynomial(p.n, {k: c for k, c in p.terms.items() if degs[k] == d})


def is_convenient(p: MixedPolynomial) -> ConvenienceReport:
    witnesses: dict[int, MixedTerm | None] = {}
    for j in range(p.n):
        hit = None
        for t in p:
            s = t.support
            if s[j] > 0 and all(v == 0 for k, v in enumerate(s) if k != j):
                hit = t
                break
        witnesses[j + 1] = hit
    return ConvenienceReport(all(w is not None for w in witnesses.values()), witnesses)


def _cofactor_normal(diffs: list[list[int]], n: int) -> tuple[int, ...]:
    """Integer normal to the n-1 row vectors (generalised cross product)."""
    if n == 1:
        return (1,)
    out = []
    for j in range(n):
        minor = [[r[k] for k in range(n) if k != j] for r in diffs]
        det = round(np.linalg.det(np.array(minor, dtype=float))) if n > 3 else _det(minor)
        out.append((-1) ** j * det)
    return tuple(out)


def _det(m: list[list[int]]) -> int:
    if len(m) == 1:
        return m[0][0]
    if len(m) == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    return sum((-1) ** j * m[0][j] * _det([r[:j] + r[j + 1 :] for r in m[1:]]) for j in range(len(m)))


def _affine_dim(points: list[tuple[int, ...]], n: int) -> int:
    if len(points) <= 1:
        return 0
    base = points[0]
    return _linalg.rank([[a - b for a, b in zip(q, base)] for q in points[1:]], n)


def _undominated(points: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    # a point ≥ another point componentwise never minimises a positive weight
    keep = []
    for q in points:
        if not any(o != q and all(a <= b for a, b in zip(o, q)) for o in points):
            keep.append(q)
    return keep


def _top_face_normals(p: MixedPolynomial) -> list[tuple[tuple[int, ...], list[tuple[int, ...]]]]:
    n = p.n
    pts = [sp.point for sp in support_points(p)]
    cand = _undominated(pts)
    found: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
    for subset in itertools.combinations(cand, n):
        base = subset[0]
        diffs = [[a - b for a, b in zip(q, base)] for q in subset[1:]]
        normal = _cofactor_normal(diffs, n)
        if all(v < 0 for v in normal):
            normal = tuple(-v for v in normal)
        if not all(v > 0 for v in normal):
            continue
        g = 0
        for v in normal:
            g = gcd(g, v)
        normal = tuple(v // g for v in normal)
        if normal in found:
            continue
        degs = [sum(w * a for w, a in zip(normal, q)) for q in pts]
        dmin = min(degs)
        if sum(w * a for w, a in zip(normal, base)) != dmin:
            continue
        face_pts = [q for q, d in zip(pts, degs) if d == dmin]
        if _affine_dim(face_pts, n) == n - 1:
            found[normal] = face_pts
    return sorted(found.items())


def top_faces(p: MixedPolynomial, *, require_convenient: bool = True) -> list[tuple[tuple[int, ...], Face]]:
    """All compact faces of Γ(f) of dimension n-1 with their primitive normals.

    Candidate normals come from every n-subset of the undominated support
    points and are validated exactly, which is exhaustive at desk scale.
    """
    if p.is_zero():
        raise DegenerateInputError("Newton boundary of the zero polynomial")
    if require_convenient:
        conv = is_convenient(p)
        if not conv:
            raise NotConvenientError(conv.missing)
    out = []
    for normal, pts in _top_face_normals(p):
        fp = face_function(p, normal)
        cls, witness, pdeg = _classify_face(fp, normal)
        out.append((normal, Face(normal, p.n - 1, fp, cls, witness, pdeg)))
    return out


def _classify_face(fp: MixedPolynomial, P: tuple[int, ...]) -> tuple[FaceType, tuple[int, ...] | None, int | None]:
    pdegs = {polar_degree(t, P) for t in fp}
    if len(pdegs) == 1 and next(iter(pdegs)) > 0:
        return FaceType.STRONGLY_POLAR_POSITIVE, P, next(iter(pdegs))
    terms = list(fp)
    n = fp.n
    rows = [[a - b for a, b in zip(t.polar, terms[0].polar)] for t in terms[1:]]
    Pp = _linalg.lexmin_positive(rows, n, ge_rows=[list(terms[0].polar)])
    if Pp is not None:
        return FaceType.POLAR_POSITIVE, Pp, polar_degree(terms[0], Pp)
    return FaceType.NEITHER, None, None


def classify_face_type(p: MixedPolynomial, *, subface_trials: int = 20, seed: int = 0) -> NewtonBoundaryReport:
    """Classify every top face; the overall label is the weakest one.

    Also spot-checks the subface property: for random positive weights the
    face function must inherit the overall classification.
    """
    faces = [f for _, f in top_faces(p)]
    overall = min((f.classification for f in faces), default=FaceType.NEITHER)
    rng = np.random.default_rng(seed)
    failures = []
    for _ in range(subface_trials):
        P = tuple(int(v) for v in rng.integers(1, 11, size=p.n))
        fp = face_function(p, P)
        if overall == FaceType.STRONGLY_POLAR_POSITIVE:
            degs = {polar_degree(t, P) for t in fp}
            ok = len(degs) == 1 and next(iter(degs)) > 0
        elif overall == FaceType.POLAR_POSITIVE:
            ok = detect_weights(fp).polar is not None
        else:
            ok = True
        if not ok:
            failures.append(P)
    return NewtonBoundaryReport(True, tuple(faces), overall, subface_trials, tuple(failures))


# ---------------------------------------------------------------------------
# non-degeneracy probe


@dataclass(frozen=True)
class FaceProbe:
    normal: tuple[int, ...]
    trials: int
    converged: int
    min_residual: float
    witness: tuple[complex, ...] | None


@dataclass(frozen=True)
class ProbeReport:
    faces: tuple[FaceProbe, ...]
    tol: float
    status: str = "non-degeneracy: probed, not proven"

    @property
    def min_residual(self) -> float:
        vals = [f.min_residual for f in self.faces if f.converged]
        return min(vals) if vals else float("nan")

    @property
    def suspected_degenerate(self) -> bool:
        return any(f.witness is not None for f in self.faces)

    @property
    def failed_seeds(self) -> int:
        return sum(f.trials - f.converged for f in self.faces)

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "tol": self.tol,
            "min_residual": self.min_residual,
            "suspected_degenerate": self.suspected_degenerate,
            "failed_seeds": self.failed_seeds,
            "faces": [
                {
                    "normal": list(f.normal),
                    "trials": f.trials,
                    "converged": f.converged,
                    "min_residual": f.min_residual,
                    "witness": None if f.witness is None else [[z.real, z.imag] for z in f.witness],
                }
                for f in self.faces
            ],
        }


def critical_residual(fp: MixedPolynomial, Z: np.ndarray) -> np.ndarray:
    """Normalised distance from mixed criticality at the rows of ``Z``.

    A point is critical for f_P when conj(∇_∂ f) = u ∇_∂̄ f with |u| = 1.
    min_{|u|=1} ‖conj(∇_∂ f) - u ∇_∂̄ f‖² = ‖a‖² + ‖b‖² - 2|(a, b)|; this is
    divided by the same gradient computed without cancellation between terms,
    so the measure is invariant under the radial action.
    """
    num = fp.numeric()
    _, gz, gzb = kernels.eval_grad(num, Z)
    a, b = np.conj(gz), gzb
    dist2 = np.sum(np.abs(a) ** 2 + np.abs(b) ** 2, axis=1) - 2 * np.abs(np.sum(a * np.conj(b), axis=1))
    dist2 = np.maximum(dist2, 0.0)
    scale2 = np.zeros(Z.shape[0])
    for t in fp:
        single = MixedPolynomial(fp.n, {(t.nu, t.mu): t.coeff}).numeric()
        _, sz, szb = kernels.eval_grad(single, Z)
        scale2 += np.sum(np.abs(sz) ** 2 + np.abs(szb) ** 2, axis=1)
    return np.sqrt(dist2 / np.where(scale2 > 0, scale2, 1.0))


def nondegeneracy_probe(p: MixedPolynomial, trials: int = 200, tol: float = 1e-3, seed: int = 0) -> ProbeReport:
    """Randomised search for mixed critical points of each top-face function on the torus.

    Seeds on the unit torus are projected onto {f_P = 0} by Gauss-Newton;
    converged points with every coordinate non-zero are scored with
    :func:`critical_residual`. A residual below ``tol`` is a suspected
    degeneracy witness. This is a probe, not a decision procedure.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    faces = top_faces(p)
    root = np.random.SeedSequence(seed)
    out = []
    for (normal, face), ss in zip(faces, root.spawn(len(faces))):
        rng = np.random.default_rng(ss)
        seeds = np.exp(1j * rng.uniform(0, 2 * np.pi, size=(trials, p.n)))
        fp = face.face_poly
        scale = sum(abs(complex(c)) for c in fp.terms.values())
        Z, res_g, _, _, conv, _ = kernels.project(
            fp.numeric(), seeds, mode=kernels.MODE_ZERO, max_iter=200, tol_g=1e-12 * scale
        )
        mags = np.abs(Z)
        on_torus = conv & np.all(mags > 1e-6 * np.max(mags, axis=1, keepdims=True), axis=1)
        if not np.any(on_torus):
            out.append(FaceProbe(normal, trials, 0, float("nan"), None))
            continue
        resid = critical_residual(fp, Z[on_torus])
        k = int(np.argmin(resid))
        witness = tuple(complex(v) for v in Z[on_torus][k]) if resid[k] < tol else None
        out.append(FaceProbe(normal, trials, int(on_torus.sum()), float(resid[k]), witness))
    return ProbeReport(tuple(out), tol)
