"""Pair-class discrepancies between two samples and the assembled target-risk bounds."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .adversary import BudgetLike, _eps, grid_axis
from .errors import ValidationError
from .linalg import DesignMatrix, row_norms, spectral_norm_symmetric
from .rademacher import (HypothesisClass, LossSpec, _adv_reg_terms, _angles_to_dirs,
                         _dirs_to_angles, _entries, _p_factor, _sgn, _unit_p, _zero_one_adv_patterns,
                         _zero_one_directions, compass_maximize)

DEFAULT_CONFIDENCE = 0.05
BRUTE_MAX_POINTS = 24


@dataclass
class DomainPair:
    source: DesignMatrix
    target: DesignMatrix
    shared_labels: bool = True

    def __post_init__(self):
        if not isinstance(self.source, DesignMatrix):
            self.source = DesignMatrix(self.source)
        if not isinstance(self.target, DesignMatrix):
            self.target = DesignMatrix(self.target)
        if self.source.d != self.target.d:
            raise ValidationError(f"source has d={self.source.d}, target has d={self.target.d}")


def second_moment(X) -> np.ndarray:
    X = _entries(X)
    C = X.T @ X / X.shape[0]
    return 0.5 * (C + C.T)


def hdh_discrepancy_regression(S, T, H: HypothesisClass) -> float:
    """4 W^2 ||C_S - C_T||_2 for squared loss over the 2-norm ball."""
    if H.p != 2:
        raise ValidationError("closed-form regression discrepancy needs p = 2; use the brute-force routine")
    S, T = _entries(S), _entries(T)
    if S.shape[1] != T.shape[1]:
        raise ValidationError("source and target dimensions differ")
    return 4 * H.W ** 2 * spectral_norm_symmetric(second_moment(S) - second_moment(T))


def _check_small(S, T):
    if S.shape[1] != T.shape[1]:
        raise ValidationError("source and target dimensions differ")
    if S.shape[1] > 2:
        raise ValidationError("brute-force discrepancy supports d <= 2")
    if S.shape[0] + T.shape[0] > BRUTE_MAX_POINTS:
        raise ValidationError(f"brute-force discrepancy supports n_S + n_T <= {BRUTE_MAX_POINTS}")


def _reg_losses(V, X, eps, delta_grid):
    """Per-direction, per-point squared loss of the difference direction V."""
    if eps == 0 or delta_grid is None:
        return _adv_reg_terms(V, X, eps)
    ax = grid_axis(eps, delta_grid)
    D = np.stack(np.meshgrid(*([ax] * X.shape[1]), indexing="ij"), axis=-1).reshape(-1, X.shape[1])
    out = np.zeros(V.shape[:-1] + (X.shape[0],))
    for delta in D:
        out = np.maximum(out, np.einsum("...d,nd->...n", V, X + delta) ** 2)
    return out


def _reg_disc(S, T, H, eps, w_grid, delta_grid):
    d = S.shape[1]
    X = np.vstack([S, T])
    wts = np.concatenate([np.full(S.shape[0], 1.0 / S.shape[0]), np.full(T.shape[0], -1.0 / T.shape[0])])
    if d == 1:
        best = abs(float(_reg_losses(np.ones((1, 1)), X, eps, delta_grid)[0] @ wts))
    else:
        t = math.pi * np.arange(w_grid) / w_grid
        U = _unit_p(np.stack([np.cos(t), np.sin(t)], axis=1), H.p)
        vals = _reg_losses(U, X, eps, delta_grid) @ wts
        best = float(np.abs(vals).max())
        # refine from the best start on each side of the absolute value
        for sgn in (1.0, -1.0):
            i = int(np.argmax(sgn * vals))

            def f(th, rows, sgn=sgn):
                V = _unit_p(_angles_to_dirs(th, 2), H.p)
                return sgn * (_reg_losses(V, X, eps, delta_grid) @ wts)

            _, v = compass_maximize(f, _dirs_to_angles(U[i:i + 1]), math.pi / w_grid)
            best = max(best, float(v[0]))
    return (2 * H.W) ** 2 * best


def _zero_one_disc(S, T, eps, w_grid, delta_grid):
    X = np.vstack([S, T])
    U = _zero_one_directions(X, eps, w_grid)
    if eps == 0:
        k = U.shape[0]
        iu, iv = np.divmod(np.arange(k * k), k)
        pats = _sgn(U[iu] @ X.T) != _sgn(U[iv] @ X.T)
    else:
        pats = _zero_one_adv_patterns(U, X, eps, delta_grid)
    pats = pats.astype(float)
    nS = S.shape[0]
    gap = pats[:, :nS].mean(axis=1) - pats[:, nS:].mean(axis=1)
    return float(np.abs(gap).max())


def hdh_discrepancy_bruteforce(S, T, H: HypothesisClass, adversarial: bool = False,
                               eps: BudgetLike = 0.0, w_grid: int = 720,
                               delta_grid: Optional[int] = None) -> float:
    """Grid search of max over pairs of |R_S - R_T|, d <= 2.

    Regression uses the difference direction v = w - w' at radius 2W (the
    risk gap is homogeneous of degree two in v); the inner max over the box is
    the closed form unless delta_grid asks for a grid. Classification uses the
    0-1 disagreement of sign classifiers. The search is a lower estimate whose
    resolution error is about GRID_REL_TOL relative.
    """
    S, T = _entries(S), _entries(T)
    _check_small(S, T)
    e = _eps(eps) if adversarial else 0.0
    if H.kind == "linear-regression":
        return _reg_disc(S, T, H, e, w_grid, delta_grid)
    if H.kind == "linear-classification":
        return _zero_one_disc(S, T, e, w_grid, delta_grid)
    raise ValidationError(f"no brute-force discrepancy for {H.kind}")


def estimate_adv_disc_from_std(S, T, H: HypothesisClass, eps: BudgetLike,
                               loss: Optional[LossSpec] = None, variant: str = "statement") -> float:
    """Additive slack s with adversarial disc <= standard disc + s.

    variant selects the regression constant: 'statement' uses W^2, 'proof'
    uses W (only valid for W <= 1).
    """
    S, T = _entries(S), _entries(T)
    if S.shape[1] != T.shape[1]:
        raise ValidationError("source and target dimensions differ")
    e = _eps(eps)
    d = S.shape[1]
    means = float(row_norms(T, 2).mean() + row_norms(S, 2).mean())
    factor = _p_factor(H.p, d)
    if H.kind == "linear-classification":
        L = (loss or LossSpec()).lipschitz
        return 2 * H.W ** 2 * L * math.sqrt(d) * e * means * factor
    if H.kind == "linear-regression":
        if variant == "statement":
            return 8 * math.sqrt(d) * e * H.W ** 2 * means * factor
        if variant == "proof":
            return 8 * math.sqrt(d) * e * H.W * means * factor
        raise ValidationError(f"variant must be 'statement' or 'proof', got {variant!r}")
    raise ValidationError(f"no discrepancy slack for {H.kind}")


# bound assembly ------------------------------------------------------------

COMPONENTS = ("source_risk", "discrepancy", "lambda_terms", "complexity_source", "complexity_target",
              "concentration_source", "concentration_target")


@dataclass
class BoundReport:
    source_risk: float
    discrepancy: float
    lambda_terms: float
    complexity_source: float
    complexity_target: float
    concentration_source: float
    concentration_target: float
    total: float
    confidence: float
    loss_bound: float
    kind: str = "standard"
    lambda_parts: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def table(self) -> str:
        rows = [(name, getattr(self, name)) for name in COMPONENTS] + [("total", self.total)]
        width = max(len(r[0]) for r in rows)
        lines = [f"{self.kind} bound (c={self.confidence:g}, M={self.loss_bound:g})"]
        lines += [f"  {k:<{width}}  {v:14.6f}" for k, v in rows]
        return "\n".join(lines)


def _nonneg(**kw):
    for k, v in kw.items():
        vals = v if isinstance(v, (list, tuple)) else [v]
        for x in vals:
            if not (x >= 0 and math.isfinite(x)):
                raise ValidationError(f"{k} must be a finite value >= 0, got {x}")


def _confidence(c):
    if not 0 < c < 1:
        raise ValidationError(f"confidence c must lie in (0, 1), got {c}")


def _sizes(n_source, n_target):
    for name, n in (("n_source", n_source), ("n_target", n_target)):
        if int(n) != n or n < 1:
            raise ValidationError(f"{name} must be a positive integer, got {n}")


def _report(kind, c, M, parts, lam_parts):
    total = math.fsum(parts[k] for k in COMPONENTS)
    return BoundReport(total=total, confidence=c, loss_bound=M, kind=kind,
                       lambda_parts=list(lam_parts), **parts)


def _two_domain_bound(kind, n_parts, source_risk, discrepancy, lambda_parts, complexity_source,
                 complexity_target, n_source, n_target, loss_bound, confidence):
    lambda_parts = list(lambda_parts)
    if len(lambda_parts) != n_parts:
        raise ValidationError(f"{kind} bound takes {n_parts} lambda terms, got {len(lambda_parts)}")
    _nonneg(source_risk=source_risk, discrepancy=discrepancy, lambda_parts=lambda_parts,
            complexity_source=complexity_source, complexity_target=complexity_target, loss_bound=loss_bound)
    _confidence(confidence)
    _sizes(n_source, n_target)
    M, lg = loss_bound, math.log(1 / confidence)
    parts = {
        "source_risk": source_risk,
        "discrepancy": discrepancy,
        "lambda_terms": math.fsum(lambda_parts),
        "complexity_source": 2 * M * complexity_source,
        "complexity_target": 2 * M * complexity_target,
        "concentration_source": 3 * M * math.sqrt(lg / n_source),
        "concentration_target": 3 * M * math.sqrt(lg / n_target),
    }
    return _report(kind, confidence, M, parts, lambda_parts)


def assemble_standard_bound(source_risk: float, discrepancy: float, lambda_parts: Sequence[float],
                            complexity_source: float, complexity_target: float, n_source: int,
                            n_target: int, loss_bound: float = 1.0,
                            confidence: float = DEFAULT_CONFIDENCE) -> BoundReport:
    """Target risk bound from the source disagreement risk.

    lambda_parts = (target risk between the two best models, target risk of
    the best target model against the labels).
    """
    return _two_domain_bound("standard", 2, source_risk, discrepancy, lambda_parts, complexity_source,
                        complexity_target, n_source, n_target, loss_bound, confidence)


def assemble_adversarial_bound(source_risk: float, discrepancy: float, lambda_parts: Sequence[float],
                               complexity_source: float, complexity_target: float, n_source: int,
                               n_target: int, loss_bound: float = 1.0,
                               confidence: float = DEFAULT_CONFIDENCE) -> BoundReport:
    """Robust target risk bound.

    lambda_parts = (robust source label risk of the best source model, robust
    target risk between the best models, robust target label risk of the best
    target model).
    """
    return _two_domain_bound("adversarial", 3, source_risk, discrepancy, lambda_parts, complexity_source,
                        complexity_target, n_source, n_target, loss_bound, confidence)


CORO_DISC = {"statement": 4.0, "proof": 3.0}


def assemble_corollary_bound(source_risk: float, discrepancy: float, lambda_parts: Sequence[float],
                             complexity_source: float, complexity_target: float, n_source: int,
                             n_target: int, loss_bound: float = 1.0,
                             confidence: float = DEFAULT_CONFIDENCE, mode: str = "statement") -> BoundReport:
    """Convex-loss variant: coefficients 6 on the source risk, (6, 3, 3) on the
    lambda parts, 4 ('statement') or 3 ('proof') on the discrepancy, 3 on each
    complexity and 9 M sqrt(ln(2/c)/n) per domain."""
    if mode not in CORO_DISC:
        raise ValidationError(f"mode must be 'statement' or 'proof', got {mode!r}")
    lambda_parts = list(lambda_parts)
    if len(lambda_parts) != 3:
        raise ValidationError(f"corollary bound takes 3 lambda terms, got {len(lambda_parts)}")
    _nonneg(source_risk=source_risk, discrepancy=discrepancy, lambda_parts=lambda_parts,
            complexity_source=complexity_source, complexity_target=complexity_target, loss_bound=loss_bound)
    _confidence(confidence)
    _sizes(n_source, n_target)
    M, lg = loss_bound, math.log(2 / confidence)
    scaled = [6 * lambda_parts[0], 3 * lambda_parts[1], 3 * lambda_parts[2]]
    parts = {
        "source_risk": 6 * source_risk,
        "discrepancy": CORO_DISC[mode] * discrepancy,
        "lambda_terms": math.fsum(scaled),
        "complexity_source": 3 * complexity_source,
        "complexity_target": 3 * complexity_target,
        "concentration_source": 9 * M * math.sqrt(lg / n_source),
        "concentration_target": 9 * M * math.sqrt(lg / n_target),
    }
    return _report(f"corollary-{mode}", confidence, M, parts, scaled)
