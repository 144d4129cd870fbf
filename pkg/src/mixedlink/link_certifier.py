"""Sampled certification on the link K_r = g⁻¹(0) ∩ S_r.

Verdicts here are statements about finitely many numerically converged
sample points, never proofs. Every report carries the sample count, margin
statistics and, when something fails, a concrete witness point.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from . import geometry, kernels
from .covering import CoveringSpec, pullback
from .homogeneity import detect_weights
from .mixed_poly import MixedPolynomial
from .newton_boundary import is_convenient, nondegeneracy_probe

__all__ = [
    "CERTIFIED",
    "VIOLATED",
    "INCONCLUSIVE",
    "SampleConfig",
    "LinkSample",
    "SampleSet",
    "CertificationReport",
    "draw_samples",
    "sample_link",
    "tube_radius",
    "transversality_check",
    "certify_holomorphic_like",
    "certify_open_book",
    "RadiusScan",
    "radius_scan",
]

CERTIFIED = "certified-on-samples"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"

_QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)


@dataclass(frozen=True)
class SampleConfig:
    radius: float
    sphere_weights: tuple[int, ...] | None = None
    n_samples: int = 200
    max_iter: int = 100
    tol_residual: float = 1e-11
    tol_rank: float = 1e-8
    seed: int = 0
    tube_delta: float = 0.1
    tol_sign: float = 1e-8  # relative band around 0 treated as "no sign"
    max_rounds: int = 20  # seed batches drawn before giving up on n_samples

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        if self.n_samples < 1:
            raise ValueError("n_samples must be at least 1")
        if self.max_iter < 1 or self.max_rounds < 1:
            raise ValueError("max_iter and max_rounds must be positive")
        for name in ("tol_residual", "tol_rank", "tube_delta", "tol_sign"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.sphere_weights is not None:
            w = tuple(int(v) for v in self.sphere_weights)
            if min(w) < 1:
                raise ValueError("sphere weights must be positive integers")
            object.__setattr__(self, "sphere_weights", w)

    def weights(self, n: int) -> np.ndarray:
        if self.sphere_weights is None:
            return np.ones(n)
        if len(self.sphere_weights) != n:
            raise ValueError(f"sphere weights have length {len(self.sphere_weights)}, expected {n}")
        return np.asarray(self.sphere_weights, dtype=float)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["sphere_weights"] = None if self.sphere_weights is None else list(self.sphere_weights)
        return out


@dataclass(frozen=True)
class LinkSample:
    point: np.ndarray
    residual_g: float
    residual_rho: float
    jacobian_min_sv: float
    smooth: bool


@dataclass
class SampleSet:
    samples: list[LinkSample]
    seeds_drawn: int
    non_converged: int
    rejected: int  # converged in the solver but failed the independent re-evaluation
    delta: float | None = None

    @property
    def points(self) -> np.ndarray:
        if not self.samples:
            return np.empty((0, 0), dtype=np.complex128)
        return np.array([s.point for s in self.samples])

    def diagnostics(self) -> dict:
        out = {
            "seeds_drawn": self.seeds_drawn,
            "non_converged": self.non_converged,
            "rejected_on_recheck": self.rejected,
            "accepted": len(self.samples),
        }
        if self.delta is not None:
            out["tube_delta_abs"] = self.delta
        return out


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, float) and not np.isfinite(x):
        return None if np.isnan(x) else ("inf" if x > 0 else "-inf")
    return x


@dataclass(frozen=True)
class CertificationReport:
    check: str
    verdict: str
    margin: float | None
    samples: int
    config: dict
    stats: dict = field(default_factory=dict)
    witness: dict | None = None
    c_threshold: float | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.verdict == CERTIFIED

    def to_dict(self) -> dict:
        out = {
            "check": self.check,
            "verdict": self.verdict,
            "margin": self.margin,
            "samples": self.samples,
            "config": self.config,
            "stats": self.stats,
            "diagnostics": self.diagnostics,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        if self.c_threshold is not None:
            out["c_threshold"] = self.c_threshold
        return _jsonable(out)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _stats(values) -> dict:
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        return {}
    out = {"min": float(v.min()), "max": float(v.max())}
    for q in _QUANTILES:
        out[f"q{int(round(q * 100)):02d}"] = float(np.quantile(v, q))
    return out


def _witness(point, value, **extra) -> dict:
    out = {"point": [[float(c.real), float(c.imag)] for c in point], "value": float(value)}
    out.update(extra)
    return out


def _sphere_seeds(rng: np.random.Generator, m: int, n: int, weights: np.ndarray, r: float) -> np.ndarray:
    """Uniform directions in ℂ^n rescaled onto ρ_a = r²."""
    Z = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
    rho = np.sum(weights * np.abs(Z) ** 2, axis=1)
    return Z * (r / np.sqrt(rho))[:, None]


def tube_radius(g: MixedPolynomial, cfg: SampleConfig, seeds: np.ndarray | None = None) -> float:
    """|g| level used for off-link sampling.

    δ = tube_delta·r^{m_r} when g is radially homogeneous with unit weights,
    otherwise tube_delta times the median of |g| over sphere seeds.
    """
    try:
        rep = detect_weights(g)
    except ValueError:
        rep = None
    if rep is not None and rep.radial is not None and set(rep.radial.weights) == {1}:
        return float(cfg.tube_delta * cfg.radius ** rep.radial.degree)
    if seeds is None:
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 1]))
        seeds = _sphere_seeds(rng, 256, g.n, np.ones(g.n), cfg.radius)
    vals, _, _ = kernels.eval_grad(g.numeric(), seeds)
    return float(cfg.tube_delta * np.median(np.abs(vals)))


def _recheck(g: MixedPolynomial, z: np.ndarray, weights: np.ndarray, r2: float, mode: int, delta: float) -> tuple[float, float]:
    """Residuals recomputed through the exact-term evaluator, not the solver kernels."""
    val = g.evaluate(z)
    rho = float(np.sum(weights * np.abs(z) ** 2))
    if mode == kernels.MODE_TUBE:
        return abs(abs(val) - delta), abs(rho - r2)
    return abs(val), abs(rho - r2)


def draw_samples(g: MixedPolynomial, cfg: SampleConfig, *, tube: bool = False) -> SampleSet:
    """Project random sphere seeds onto K_r (or onto {|g| = δ} ∩ S_r when ``tube``).

    Seeds come in batches from a generator rooted at ``cfg.seed``; batches
    are drawn until ``n_samples`` points are accepted or ``max_rounds`` is
    reached, so the result is a deterministic function of (g, cfg).
    """
    if g.is_zero():
        raise ValueError("g is the zero polynomial")
    if g.n < 2:
        raise ValueError("link sampling needs n >= 2")
    n = g.n
    mode = kernels.MODE_TUBE if tube else kernels.MODE_LINK
    weights = np.ones(n) if tube else cfg.weights(n)
    r2 = cfg.radius**2
    root = np.random.SeedSequence(cfg.seed)
    poly = g.numeric()
    delta = tube_radius(g, cfg) if tube else None
    delta2 = 0.0 if delta is None else delta * delta

    accepted: list[LinkSample] = []
    drawn = non_conv = rejected = 0
    for child in root.spawn(cfg.max_rounds):
        need = cfg.n_samples - len(accepted)
        if need <= 0:
            break
        batch = max(need + need // 4, 8)
        seeds = _sphere_seeds(np.random.default_rng(child), batch, n, weights, cfg.radius)
        drawn += batch
        Z, rg, rr, sv, ok, _ = kernels.project(
            poly,
            seeds,
            mode=mode,
            weights=weights,
            r2=r2,
            delta2=delta2,
            max_iter=cfg.max_iter,
            tol_g=cfg.tol_residual,
            tol_rho=cfg.tol_residual,
        )
        for i in range(batch):
            if not ok[i]:
                non_conv += 1
                continue
            if len(accepted) >= cfg.n_samples:
                break
            cg, cr = _recheck(g, Z[i], weights, r2, mode, delta or 0.0)
            if cg > cfg.tol_residual or cr > cfg.tol_residual:
                rejected += 1
                continue
            accepted.append(LinkSample(Z[i].copy(), float(rg[i]), float(rr[i]), float(sv[i]), bool(sv[i] >= cfg.tol_rank)))
    return SampleSet(accepted, drawn, non_conv, rejected, delta)


def sample_link(g: MixedPolynomial, cfg: SampleConfig) -> list[LinkSample]:
    return draw_samples(g, cfg).samples


def _empty_report(check: str, cfg: SampleConfig, ss: SampleSet, why: str) -> CertificationReport:
    diag = ss.diagnostics()
    diag["reason"] = why
    return CertificationReport(check, INCONCLUSIVE, None, 0, cfg.to_dict(), diagnostics=diag)


def transversality_check(g: MixedPolynomial, cfg: SampleConfig, samples: SampleSet | None = None) -> CertificationReport:
    """Certify that the constraint Jacobian of K_r on ρ_a = r² has full rank at every sample."""
    ss = draw_samples(g, cfg) if samples is None else samples
    if not ss.samples:
        return _empty_report("transversality", cfg, ss, "no converged samples")
    sv = np.array([s.jacobian_min_sv for s in ss.samples])
    worst = int(np.argmin(sv))
    diag = ss.diagnostics()
    diag["rank_deficient"] = int(np.sum(sv < cfg.tol_rank))
    witness = None
    verdict = CERTIFIED
    if sv[worst] < cfg.tol_rank:
        verdict = VIOLATED
        witness = _witness(ss.samples[worst].point, sv[worst], quantity="jacobian_min_sv")
    return CertificationReport(
        "transversality", verdict, float(sv[worst]), len(sv), cfg.to_dict(), _stats(sv), witness, diagnostics=diag
    )


def _c_values(g: MixedPolynomial, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    _, gz, gzb = kernels.eval_grad(g.numeric(), pts)
    return geometry.c_total_batch(pts, gz, gzb)


def certify_holomorphic_like(
    g: MixedPolynomial,
    cfg: SampleConfig,
    expected_sign: int = 1,
    samples: SampleSet | None = None,
) -> CertificationReport:
    """Check sign(C) = ``expected_sign`` at every smooth sample of K_r.

    Non-smooth samples are excluded and counted; |C| inside the relative
    band ``tol_sign`` makes the verdict inconclusive.
    """
    if expected_sign not in (1, -1):
        raise ValueError("expected_sign must be +1 or -1")
    ss = draw_samples(g, cfg) if samples is None else samples
    smooth = [s for s in ss.samples if s.smooth]
    diag = ss.diagnostics()
    diag["excluded_non_smooth"] = len(ss.samples) - len(smooth)
    diag["expected_sign"] = "+" if expected_sign > 0 else "-"
    if not smooth:
        return _empty_report("contact", cfg, ss, "no smooth samples")
    pts = np.array([s.point for s in smooth])
    C, scale = _c_values(g, pts)
    signed = expected_sign * C
    near_zero = np.abs(C) <= cfg.tol_sign * np.maximum(scale, np.finfo(float).tiny)
    wrong = (signed < 0) & ~near_zero
    diag["near_zero"] = int(near_zero.sum())
    diag["wrong_sign"] = int(wrong.sum())
    witness = None
    if wrong.any():
        verdict = VIOLATED
        i = int(np.argmin(np.where(wrong, signed, np.inf)))
        witness = _witness(pts[i], C[i], quantity="C")
    elif near_zero.any():
        verdict = INCONCLUSIVE
        i = int(np.argmin(np.abs(C)))
        witness = _witness(pts[i], C[i], quantity="C")
    else:
        verdict = CERTIFIED
    return CertificationReport(
        "contact", verdict, float(np.min(np.abs(C))), len(smooth), cfg.to_dict(), _stats(C), witness, diagnostics=diag
    )


def _input_flags(f: MixedPolynomial) -> dict:
    flags: dict = {}
    conv = is_convenient(f)
    flags["convenient"] = bool(conv.convenient)
    if conv.convenient:
        probe = nondegeneracy_probe(f, trials=50)
        flags["nondegeneracy"] = probe.status
        flags["suspected_degenerate"] = probe.suspected_degenerate
    return flags


def certify_open_book(f: MixedPolynomial, spec: CoveringSpec, cfg: SampleConfig) -> CertificationReport:
    """Positivity of dθ on the Reeb field of α_c over samples of {|g| = δ} ∩ S_r, g = φ*f.

    The reported quantity is 4ρ·dθ(R) (equal to 2d(a-b) in the homogeneous
    case). ``c_threshold`` is the infimum of c making dθ(R_c) > 0 at every
    sample; it is 0 when dθ(R) > 0 already.
    """
    g = pullback(f, spec)
    ss = draw_samples(g, cfg, tube=True)
    diag = ss.diagnostics()
    diag["input"] = _input_flags(f)
    diag["covering"] = spec.to_dict()
    if not ss.samples:
        return _empty_report("openbook", cfg, ss, "no converged tube samples")
    W = ss.points
    val, gz, gzb = kernels.eval_grad(g.numeric(), W)
    rho = np.sum(np.abs(W) ** 2, axis=1)
    dtheta = geometry.reeb_pairing_batch(W, val, gz, gzb)
    corr, corr_scale = geometry.correction_batch(W, val, gz, gzb)
    g2 = np.abs(val) ** 2
    normalized = 4 * rho * dtheta
    # scale for the dθ sign band: |∇θ|·|R| bounds |dθ(R)|
    dscale = np.linalg.norm(geometry.theta_gradient_batch(W, val, gz, gzb), axis=1) / (2 * np.sqrt(rho))
    nonpos = dtheta <= cfg.tol_sign * dscale
    corr_pos = corr > cfg.tol_sign * corr_scale
    corr_neg = corr < -cfg.tol_sign * corr_scale

    blocked = nonpos & ~corr_pos
    need = nonpos & corr_pos
    c_lo = float(np.max(-2 * g2[need] * dtheta[need] / corr[need])) if need.any() else 0.0
    cap = (~nonpos) & corr_neg
    c_hi = float(np.min(2 * g2[cap] * dtheta[cap] / -corr[cap])) if cap.any() else float("inf")
    diag["dtheta_nonpositive"] = int(nonpos.sum())
    diag["c_upper"] = c_hi
    diag["orientation_reversed"] = bool(np.all(dtheta < 0))

    witness = None
    c_threshold: float | None = c_lo
    if blocked.any():
        verdict = VIOLATED
        i = int(np.argmin(np.where(blocked, normalized, np.inf)))
        witness = _witness(W[i], normalized[i], quantity="4*rho*dtheta(R)", correction=float(corr[i]))
        c_threshold = None
        c_used = 0.0
    elif c_lo >= c_hi:
        verdict = VIOLATED
        i = int(np.argmin(np.where(cap, 2 * g2 * dtheta / np.where(cap, -corr, 1.0), np.inf)))
        witness = _witness(W[i], normalized[i], quantity="4*rho*dtheta(R)", correction=float(corr[i]))
        c_used = c_lo
    else:
        verdict = CERTIFIED
        c_used = 0.0 if c_lo == 0 else (min(2 * c_lo, 0.5 * (c_lo + c_hi)) if np.isfinite(c_hi) else 2 * c_lo)
    diag["c_used"] = c_used
    # dθ(R_c)/k, normalised like dθ(R)
    shifted = 4 * rho * (dtheta + 0.5 * c_used * corr / g2)
    margin = float(np.min(shifted))
    if verdict == CERTIFIED and margin <= 0:
        verdict = INCONCLUSIVE
        i = int(np.argmin(shifted))
        witness = _witness(W[i], shifted[i], quantity="4*rho*dtheta(R_c)/k")
    return CertificationReport(
        "openbook",
        verdict,
        margin,
        len(ss.samples),
        cfg.to_dict(),
        _stats(normalized),
        witness,
        c_threshold,
        diag,
    )


@dataclass(frozen=True)
class RadiusScan:
    reports: list[CertificationReport]
    radii: tuple[float, ...]

    @property
    def sign_change_radius(self) -> float | None:
        """Smallest listed radius whose verdict is not certified while all smaller ones are."""
        order = np.argsort(self.radii)
        seen_ok = False
        for i in order:
            if self.reports[i].certified:
                seen_ok = True
            elif seen_ok:
                return float(self.radii[i])
            else:
                return None
        return None


def radius_scan(run: Callable[[SampleConfig], CertificationReport], base: SampleConfig, radii: Sequence[float]) -> RadiusScan:
    """Run one check at each radius (in the given order)."""
    reports = [run(replace(base, radius=float(r))) for r in radii]
    return RadiusScan(reports, tuple(float(r) for r in radii))
