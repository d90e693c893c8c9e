"""Linear classifiers trained with k-step PGD and an l1 penalty, plus synthetic domains."""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import NumericalError, ValidationError
from .linalg import DesignMatrix, p_norm

SWEEP_COLUMNS = ("mu", "eps", "ra_source", "ra_target", "delta", "sa_source", "sa_target")
TRAIN_FRACTION = 0.7


@dataclass(frozen=True)
class TrainConfig:
    eps: float = 8 / 255
    pgd_steps: int = 7
    pgd_step_size: float = 2 / 255
    epochs: int = 200
    learning_rate: float = 0.5
    cosine: bool = True
    l1_mu: float = 0.0
    loss: str = "logistic"
    fit_bias: bool = False
    seed: int = 0

    def __post_init__(self):
        if not (self.eps >= 0 and math.isfinite(self.eps)):
            raise ValidationError(f"eps must be >= 0, got {self.eps}")
        if int(self.pgd_steps) != self.pgd_steps or self.pgd_steps < 0:
            raise ValidationError("pgd_steps must be a nonnegative integer")
        if not self.pgd_step_size > 0:
            raise ValidationError("pgd_step_size must be positive")
        if int(self.epochs) != self.epochs or self.epochs < 1:
            raise ValidationError("epochs must be a positive integer")
        if not self.learning_rate > 0:
            raise ValidationError("learning_rate must be positive")
        if not self.l1_mu >= 0:
            raise ValidationError("l1_mu must be >= 0")
        if self.loss not in ("logistic", "hinge"):
            raise ValidationError(f"loss must be 'logistic' or 'hinge', got {self.loss!r}")


@dataclass
class LinearModel:
    w: np.ndarray
    bias: Optional[float] = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=float).ravel()
        if not np.all(np.isfinite(self.w)) or (self.bias is not None and not math.isfinite(self.bias)):
            raise ValidationError("model weights must be finite")

    @classmethod
    def zeros(cls, d: int, bias: bool = False) -> "LinearModel":
        return cls(np.zeros(d), 0.0 if bias else None)

    def decision(self, X) -> np.ndarray:
        f = np.asarray(X, dtype=float) @ self.w
        return f + self.bias if self.bias is not None else f


def margin_loss(m: np.ndarray, kind: str) -> np.ndarray:
    if kind == "logistic":
        return np.logaddexp(0.0, -m)
    return np.maximum(0.0, 1.0 - m)


def margin_loss_slope(m: np.ndarray, kind: str) -> np.ndarray:
    """d loss / d margin; the hinge kink at m = 1 takes slope 0."""
    if kind == "logistic":
        return -np.exp(-np.logaddexp(0.0, m))
    return np.where(m < 1.0, -1.0, 0.0)


def _xy(data) -> Tuple[np.ndarray, np.ndarray]:
    if not isinstance(data, DesignMatrix):
        raise ValidationError("expected a DesignMatrix")
    return data.entries, data.require_labels()


def pgd_attack_linear(model: LinearModel, X, y, cfg: TrainConfig) -> np.ndarray:
    """k steps of delta <- clip(delta + alpha sign(grad), eps) from delta = 0."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    delta = np.zeros_like(X)
    if cfg.eps == 0:
        return X.copy()
    for _ in range(cfg.pgd_steps):
        m = y * model.decision(X + delta)
        g = (margin_loss_slope(m, cfg.loss) * y)[:, None] * model.w[None, :]
        delta = np.clip(delta + cfg.pgd_step_size * np.sign(g), -cfg.eps, cfg.eps)
    return X + delta


def worst_case_loss(model: LinearModel, X, y, eps: float, kind: str = "logistic") -> np.ndarray:
    """Per-sample loss at the corner delta* = -eps y sign(w)."""
    m = np.asarray(y, dtype=float) * model.decision(X) - eps * p_norm(model.w, 1)
    return margin_loss(m, kind)


def _lr(cfg: TrainConfig, t: int) -> float:
    if not cfg.cosine:
        return cfg.learning_rate
    return cfg.learning_rate * 0.5 * (1.0 + math.cos(math.pi * t / cfg.epochs))


def train(model0: LinearModel, data: DesignMatrix, cfg: TrainConfig, mode: str = "adversarial") -> LinearModel:
    """Full-batch descent on mean loss + mu ||w||_1.

    The loss takes a (sub)gradient step and the l1 term a soft-threshold step,
    so a large mu shrinks w instead of making it oscillate around zero.
    """
    if mode not in ("standard", "adversarial"):
        raise ValidationError(f"mode must be 'standard' or 'adversarial', got {mode!r}")
    X, y = _xy(data)
    if model0.w.size != X.shape[1]:
        raise ValidationError(f"model has d={model0.w.size}, data has d={X.shape[1]}")
    w = model0.w.copy()
    b = model0.bias if (cfg.fit_bias or model0.bias is not None) else None
    if cfg.fit_bias and b is None:
        b = 0.0
    n = X.shape[0]
    history = []
    for t in range(cfg.epochs):
        cur = LinearModel(w, b)
        Xa = pgd_attack_linear(cur, X, y, cfg) if mode == "adversarial" else X
        m = y * cur.decision(Xa)
        loss = float(np.mean(margin_loss(m, cfg.loss))) + cfg.l1_mu * p_norm(w, 1)
        if not math.isfinite(loss):
            raise NumericalError(f"non-finite training loss at epoch {t}")
        history.append(loss)
        s = margin_loss_slope(m, cfg.loss) * y
        gw = Xa.T @ s / n
        step = _lr(cfg, t)
        with np.errstate(over="ignore", invalid="ignore"):
            w = w - step * gw
            if cfg.l1_mu > 0:
                w = np.sign(w) * np.maximum(np.abs(w) - step * cfg.l1_mu, 0.0)
            if b is not None:
                b = b - step * float(np.sum(s)) / n
        if not np.all(np.isfinite(w)):
            raise NumericalError(f"non-finite weights at epoch {t}")
    meta = {"config": asdict(cfg), "mode": mode, "final_loss": history[-1], "first_loss": history[0]}
    return LinearModel(w, b, meta)


@dataclass
class Evaluation:
    sa: float
    ra: float
    ra_pgd: float


def robust_correct(model: LinearModel, X, y, eps: float) -> np.ndarray:
    """Correct for every delta in the box, with sign(0) = +1."""
    f = model.decision(X)
    r = eps * p_norm(model.w, 1)
    return np.where(y > 0, f - r >= 0, f + r < 0)


def evaluate(model: LinearModel, data: DesignMatrix, eps: float, cfg: Optional[TrainConfig] = None) -> Evaluation:
    X, y = _xy(data)
    sa = float(np.mean(np.where(model.decision(X) >= 0, 1.0, -1.0) == y))
    ra = float(np.mean(robust_correct(model, X, y, eps)))
    att = TrainConfig(eps=eps) if cfg is None else TrainConfig(**{**asdict(cfg), "eps": eps})
    Xp = pgd_attack_linear(model, X, y, att)
    ra_pgd = float(np.mean(np.where(model.decision(Xp) >= 0, 1.0, -1.0) == y))
    return Evaluation(sa, ra, ra_pgd)


# synthetic domains -----------------------------------------------------------

@dataclass(frozen=True)
class SyntheticDomainSpec:
    """Two-class Gaussian mixture; the target is a rotated and translated copy.

    Coordinate 0 carries the class signal; the others carry a weaker
    nuisance signal that the shift breaks.
    """
    n: int = 400
    d: int = 2
    separation: float = 2.0
    cov_scale: float = 1.0
    rotation: float = 0.0
    rotation_plane: Tuple[int, int] = (0, 1)
    translation: float = 0.0
    nuisance_signal: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValidationError("n must be an integer >= 2")
        if int(self.d) != self.d or self.d < 1:
            raise ValidationError("d must be a positive integer")
        if not self.cov_scale > 0:
            raise ValidationError(f"degenerate covariance: cov_scale={self.cov_scale}")
        if not 0 <= self.rotation < math.pi:
            raise ValidationError("rotation must lie in [0, pi)")
        i, j = self.rotation_plane
        if self.rotation != 0 and not (0 <= i < self.d and 0 <= j < self.d and i != j):
            raise ValidationError(f"rotation plane {self.rotation_plane} invalid for d={self.d}")


@dataclass
class LabeledDomains:
    source: DesignMatrix
    target: DesignMatrix


def rotation_matrix(d: int, plane: Tuple[int, int], angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    # snap values like cos(pi/2) = 6e-17 so quarter turns are exact
    c = 0.0 if abs(c) < 1e-15 else c
    s = 0.0 if abs(s) < 1e-15 else s
    R = np.eye(d)
    i, j = plane
    R[i, i], R[i, j], R[j, i], R[j, j] = c, -s, s, c
    return R


def class_means(spec: SyntheticDomainSpec) -> np.ndarray:
    """Row 0 for y = -1, row 1 for y = +1."""
    mu = np.full(spec.d, spec.nuisance_signal)
    mu[0] = spec.separation / 2
    return np.stack([-mu, mu])


def _draw(spec, rng):
    y = np.where(rng.random(spec.n) < 0.5, -1.0, 1.0)
    X = class_means(spec)[(y > 0).astype(int)] + spec.cov_scale * rng.standard_normal((spec.n, spec.d))
    return X, y


def target_transform(spec: SyntheticDomainSpec) -> Tuple[np.ndarray, np.ndarray]:
    R = rotation_matrix(spec.d, spec.rotation_plane, spec.rotation) if spec.rotation else np.eye(spec.d)
    t = np.full(spec.d, spec.translation)
    t[0] = 0.0
    return R, t


def generate_domains(spec: SyntheticDomainSpec) -> LabeledDomains:
    rng = np.random.default_rng(spec.seed)
    Xs, ys = _draw(spec, rng)
    Xt, yt = _draw(spec, rng)
    R, t = target_transform(spec)
    Xt = Xt @ R.T + t
    return LabeledDomains(DesignMatrix(Xs, ys), DesignMatrix(Xt, yt))


def split(data: DesignMatrix, seed: int, fraction: float = TRAIN_FRACTION) -> Tuple[DesignMatrix, DesignMatrix]:
    rng = np.random.default_rng(seed)
    idx = rng.permutation(data.n)
    k = int(round(fraction * data.n))
    if k < 1 or k >= data.n:
        raise ValidationError("split leaves an empty part")
    a, b = np.sort(idx[:k]), np.sort(idx[k:])
    y = data.require_labels()
    return DesignMatrix(data.entries[a], y[a]), DesignMatrix(data.entries[b], y[b])


# l1 sweep --------------------------------------------------------------------

@dataclass
class SweepRow:
    mu: float
    eps: float
    ra_source: float
    ra_target: float
    delta: float
    sa_source: float
    sa_target: float
    w_l1: float


def _cell(args):
    mu, eps, src_train, src_test, tgt_test, cfg = args
    c = TrainConfig(**{**asdict(cfg), "eps": eps, "l1_mu": mu})
    model = train(LinearModel.zeros(src_train.d, cfg.fit_bias), src_train, c, "adversarial")
    es = evaluate(model, src_test, eps, c)
    et = evaluate(model, tgt_test, eps, c)
    return SweepRow(mu, eps, es.ra, et.ra, es.ra - et.ra, es.sa, et.sa, p_norm(model.w, 1))


def l1_sweep_experiment(spec: SyntheticDomainSpec, mu_grid: Sequence[float], eps_grid: Sequence[float],
                        cfg: Optional[TrainConfig] = None, threads: int = 1) -> List[SweepRow]:
    """Adversarially train one model per (mu, eps) on the source training split and
    report robust accuracy on both held-out splits."""
    if len(mu_grid) == 0 or len(eps_grid) == 0:
        raise ValidationError("mu and eps grids must be nonempty")
    cfg = cfg or TrainConfig(seed=spec.seed)
    doms = generate_domains(spec)
    s_tr, s_te = split(doms.source, spec.seed)
    _, t_te = split(doms.target, spec.seed + 1)
    jobs = [(float(mu), float(e), s_tr, s_te, t_te, cfg) for mu in mu_grid for e in eps_grid]
    if threads <= 1:
        return [_cell(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(_cell, jobs))


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(SWEEP_COLUMNS)
    for r in rows:
        wr.writerow([f"{getattr(r, c):.6f}" for c in SWEEP_COLUMNS])
    return buf.getvalue()


def write_sweep_csv(rows: Sequence[SweepRow], path) -> None:
    Path(path).write_text(sweep_csv(rows), encoding="utf-8")


# reference experiment: ten features, nine of them weak nuisances that the
# target rotates and translates
REFERENCE_SPEC = SyntheticDomainSpec(n=1000, d=10, separation=1.5, cov_scale=1.0, rotation=math.pi / 2,
                                     rotation_plane=(1, 2), translation=0.3, nuisance_signal=0.2, seed=3)
REFERENCE_MU_GRID = (0.0, 1e-3, 1e-2, 3e-2)
REFERENCE_EPS_GRID = (0.0, 2 / 255, 4 / 255, 8 / 255)
