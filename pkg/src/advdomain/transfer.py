"""Subset sum with a structural objective and the robust-to-standard risk transfer.

V*(p', p, ell, free) = min over binary ell~ that agree with ell outside
`free` of |p^T ell~ - p'^T ell|. Both solvers screen candidates with fast
float sums, then rank the survivors by one canonical evaluation (compensated
sums) so they return the same optimum and the same witness bit for bit.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Tuple

import numpy as np

from .adversary import BudgetLike, _eps
from .errors import ValidationError
from .linalg import p_norm

SIMPLEX_TOL = 1e-9
BRUTE_MAX_FREE = 24
MITM_MAX_FREE = 48
TRANSFER_MAX_N = 24


def _simplex(v, name, renormalize=False) -> np.ndarray:
    v = np.asarray(v, dtype=float).ravel()
    if v.size == 0 or not np.all(np.isfinite(v)) or np.any(v < 0):
        raise ValidationError(f"{name} must be a nonnegative finite vector")
    s = math.fsum(v)
    if renormalize:
        if s <= 0:
            raise ValidationError(f"{name} has zero mass")
        return v / s
    if abs(s - 1.0) > SIMPLEX_TOL:
        raise ValidationError(f"{name} sums to {s!r}, not 1 within {SIMPLEX_TOL}")
    return v


@dataclass
class SubsetSumInstance:
    p: np.ndarray
    p_prime: np.ndarray
    ell: np.ndarray
    free: Tuple[int, ...] = ()
    renormalize: bool = False

    def __post_init__(self):
        self.p = _simplex(self.p, "p", self.renormalize)
        self.p_prime = _simplex(self.p_prime, "p_prime", self.renormalize)
        ell = np.asarray(self.ell).ravel()
        if not np.all(np.isin(ell, (0, 1))):
            raise ValidationError("ell entries must be 0 or 1")
        self.ell = ell.astype(np.int8)
        if not (self.p.size == self.p_prime.size == self.ell.size):
            raise ValidationError("p, p_prime and ell must have the same length")
        free = tuple(int(i) for i in self.free)
        if len(set(free)) != len(free) or any(i < 0 or i >= self.N for i in free):
            raise ValidationError(f"free indices must be distinct and in [0, {self.N})")
        self.free = tuple(sorted(free))

    @property
    def N(self) -> int:
        return self.p.size

    @classmethod
    def from_json(cls, path_or_text) -> "SubsetSumInstance":
        """Reads {"p", "p_prime", "ell", "free"} with 1-based free indices."""
        text = str(path_or_text)
        if not text.lstrip().startswith("{"):
            text = Path(path_or_text).read_text(encoding="utf-8")
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"bad subset-sum JSON: {exc}") from None
        unknown = set(obj) - {"p", "p_prime", "ell", "free"}
        missing = {"p", "p_prime", "ell", "free"} - set(obj)
        if unknown or missing:
            raise ValidationError(f"subset-sum JSON keys: unknown {sorted(unknown)}, missing {sorted(missing)}")
        return cls(obj["p"], obj["p_prime"], obj["ell"], tuple(int(i) - 1 for i in obj["free"]))

    def to_json(self) -> str:
        return json.dumps({"p": self.p.tolist(), "p_prime": self.p_prime.tolist(),
                           "ell": self.ell.tolist(), "free": [i + 1 for i in self.free]}, sort_keys=True)


def target_value(inst: SubsetSumInstance) -> float:
    return math.fsum(inst.p_prime[inst.ell == 1])


def canonical_objective(inst: SubsetSumInstance, ell_tilde) -> float:
    """|p^T ell~ - p'^T ell| with both inner products as compensated sums."""
    lt = np.asarray(ell_tilde)
    return abs(math.fsum(inst.p[lt == 1]) - target_value(inst))


def _subset_sums(vals: np.ndarray) -> np.ndarray:
    """Sums of all subsets; index bit k-1-i (the most significant for i = 0) selects vals[i]."""
    sums = np.zeros(1)
    for v in vals[::-1]:
        sums = np.concatenate([sums, sums + v])
    return sums


def _screen_tol(inst: SubsetSumInstance) -> float:
    return 4.0 * (inst.N + 2) * 2.0 ** -52


def _witness(inst: SubsetSumInstance, bits: np.ndarray) -> np.ndarray:
    lt = inst.ell.copy()
    lt[list(inst.free)] = bits
    return lt


def _bits(j: int, k: int) -> np.ndarray:
    return np.array([(j >> (k - 1 - i)) & 1 for i in range(k)], dtype=np.int8)


def _pick(inst, codes, k):
    """Canonical minimum over candidate completion codes, ties to the smallest code."""
    best = None
    for j in sorted(int(c) for c in codes):
        lt = _witness(inst, _bits(j, k))
        val = canonical_objective(inst, lt)
        if best is None or val < best[0]:
            best = (val, lt)
    return best


def _base(inst):
    fixed = np.ones(inst.N, dtype=bool)
    fixed[list(inst.free)] = False
    return float(np.sum(inst.p[fixed & (inst.ell == 1)])), target_value(inst)


def vstar_bruteforce(inst: SubsetSumInstance) -> Tuple[float, np.ndarray]:
    k = len(inst.free)
    if k > BRUTE_MAX_FREE:
        raise ValidationError(f"brute force supports at most {BRUTE_MAX_FREE} free indices, got {k}")
    base, target = _base(inst)
    approx = np.abs(base + _subset_sums(inst.p[list(inst.free)]) - target)
    codes = np.flatnonzero(approx <= approx.min() + _screen_tol(inst))
    return _pick(inst, codes, k)


def vstar_meet_in_middle(inst: SubsetSumInstance) -> Tuple[float, np.ndarray]:
    k = len(inst.free)
    if k > MITM_MAX_FREE:
        raise ValidationError(f"meet-in-the-middle supports at most {MITM_MAX_FREE} free indices, got {k}")
    base, target = _base(inst)
    vals = inst.p[list(inst.free)]
    h = k // 2
    left = _subset_sums(vals[:h])
    right = _subset_sums(vals[h:])
    order = np.argsort(right, kind="stable")
    rs = right[order]
    want = target - base - left
    pos = np.searchsorted(rs, want)
    lo = np.clip(pos - 1, 0, rs.size - 1)
    hi = np.clip(pos, 0, rs.size - 1)
    per_left = np.minimum(np.abs(base + left + rs[lo] - target), np.abs(base + left + rs[hi] - target))
    m = float(per_left.min())
    tol = _screen_tol(inst)
    # every right half whose screened value is within tol of the best
    a = np.searchsorted(rs, want - m - 2 * tol, side="left")
    b = np.searchsorted(rs, want + m + 2 * tol, side="right")
    shift = k - h
    codes = []
    for jl in np.flatnonzero(b > a):
        for jr in order[a[jl]:b[jl]]:
            if abs(base + left[jl] + right[jr] - target) <= m + tol:
                codes.append((int(jl) << shift) | int(jr))
    return _pick(inst, codes, k)


def vstar(inst: SubsetSumInstance, solver: str = "auto") -> Tuple[float, np.ndarray]:
    if solver == "bruteforce" or (solver == "auto" and len(inst.free) <= 16):
        return vstar_bruteforce(inst)
    if solver in ("auto", "mitm", "meet-in-middle"):
        return vstar_meet_in_middle(inst)
    raise ValidationError(f"unknown solver {solver!r}")


# risk transfer ---------------------------------------------------------------

@dataclass
class DiscreteDomainPair:
    support: np.ndarray
    mass_T: np.ndarray
    mass_Tprime: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.support, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        if X.ndim != 2 or X.shape[0] < 1 or not np.all(np.isfinite(X)):
            raise ValidationError("support must be a finite N x d array")
        self.support = X
        self.mass_T = _simplex(self.mass_T, "mass_T")
        self.mass_Tprime = _simplex(self.mass_Tprime, "mass_Tprime")
        y = np.asarray(self.labels, dtype=float).ravel()
        if not np.all(np.isin(y, (-1.0, 1.0))):
            raise ValidationError("labels must be -1 or +1")
        self.labels = y
        if not (X.shape[0] == self.mass_T.size == self.mass_Tprime.size == y.size):
            raise ValidationError("support, masses and labels must have the same length")

    @property
    def N(self) -> int:
        return self.support.shape[0]


def _weights(w, d) -> np.ndarray:
    w = np.asarray(w, dtype=float).ravel()
    if w.size != d:
        raise ValidationError(f"w has length {w.size}, expected {d}")
    if not np.any(w != 0):
        raise ValidationError("w is all zero; the sign classifier is undefined")
    return w


def lambda_eps_set(X, w, eps: BudgetLike) -> Tuple[int, ...]:
    """Indices i with |w^T x_i| <= eps ||w||_1 (0-based, boundary included)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    w = _weights(w, X.shape[1])
    e = _eps(eps)
    return tuple(int(i) for i in np.flatnonzero(np.abs(X @ w) <= e * p_norm(w, 1)))


def clean_losses(X, y, w) -> np.ndarray:
    s = np.where(X @ w >= 0, 1.0, -1.0)
    return (s != y).astype(np.int8)


def robust_losses(X, y, w, eps: float) -> np.ndarray:
    # robust-correct needs a strict margin: boundary points can be flipped
    return (~(y * (X @ w) > eps * p_norm(w, 1))).astype(np.int8)


@dataclass
class TransferCheck:
    lhs: float
    robust_risk: float
    vstar: float
    rhs: float
    holds: bool
    free: Tuple[int, ...]
    witness: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"lhs": self.lhs, "robust_risk": self.robust_risk, "vstar": self.vstar, "rhs": self.rhs,
                "holds": self.holds, "free": [i + 1 for i in self.free], "witness": list(self.witness)}


def risk_transfer_bound(pair: DiscreteDomainPair, w, eps: BudgetLike, solver: str = "auto") -> TransferCheck:
    """Standard risk on T' against robust risk on T plus V*."""
    if pair.N > TRANSFER_MAX_N:
        raise ValidationError(f"risk transfer supports at most {TRANSFER_MAX_N} support points")
    X, y = pair.support, pair.labels
    w = _weights(w, X.shape[1])
    e = _eps(eps)
    ell = clean_losses(X, y, w)
    r = robust_losses(X, y, w, e)
    free = lambda_eps_set(X, w, e)
    lhs = math.fsum(pair.mass_Tprime[ell == 1])
    robust = math.fsum(pair.mass_T[r == 1])
    v, wit = vstar(SubsetSumInstance(pair.mass_T, pair.mass_Tprime, ell, free), solver)
    rhs = robust + v
    return TransferCheck(lhs, robust, v, rhs, lhs <= rhs + 1e-12, free, wit.tolist())


@dataclass
class ErmComparison:
    robust: TransferCheck
    erm: TransferCheck
    vstar_eps: float
    vstar_zero: float
    ok: bool

    def to_dict(self) -> dict:
        return {"robust": self.robust.to_dict(), "erm": self.erm.to_dict(), "vstar_eps": self.vstar_eps,
                "vstar_zero": self.vstar_zero, "ok": self.ok}


def erm_vs_robust_comparison(pair: DiscreteDomainPair, w, eps: BudgetLike, solver: str = "auto") -> ErmComparison:
    rob = risk_transfer_bound(pair, w, eps, solver)
    erm = risk_transfer_bound(pair, w, 0.0, solver)
    return ErmComparison(rob, erm, rob.vstar, erm.vstar, rob.vstar <= erm.vstar)
