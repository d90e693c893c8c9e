"""Vector and matrix kernels shared by every other module."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .errors import NumericalError, ValidationError

SYMMETRY_TOL = 1e-12
# Weyl sequence used as the deterministic restart direction
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class NormOrder:
    p: float

    def __post_init__(self):
        p = float(self.p)
        if math.isnan(p) or p < 1.0:
            raise ValidationError(f"norm order must be >= 1 or inf, got {self.p}")
        object.__setattr__(self, "p", p)

    @property
    def dual(self) -> "NormOrder":
        return NormOrder(dual_exponent(self.p))

    @property
    def is_inf(self) -> bool:
        return math.isinf(self.p)


OrderLike = Union[NormOrder, float, int]


def _order(p: OrderLike) -> float:
    return p.p if isinstance(p, NormOrder) else NormOrder(p).p


def dual_exponent(p: OrderLike) -> float:
    p = _order(p)
    if p == 1.0:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def p_norm(v, p: OrderLike) -> float:
    v = np.asarray(v, dtype=float).ravel()
    if v.size == 0:
        raise ValidationError("p_norm of an empty vector")
    p = _order(p)
    a = np.abs(v)
    if math.isinf(p):
        return float(a.max())
    if p == 1.0:
        return float(a.sum())
    if p == 2.0:
        return float(np.sqrt(np.dot(a, a)))
    # scale first to avoid overflow for large p
    m = a.max()
    if m == 0.0:
        return 0.0
    return float(m * np.sum((a / m) ** p) ** (1.0 / p))


def row_norms(M, p: OrderLike) -> np.ndarray:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    p = _order(p)
    a = np.abs(M)
    if math.isinf(p):
        return a.max(axis=1)
    if p == 1.0:
        return a.sum(axis=1)
    if p == 2.0:
        return np.sqrt(np.einsum("ij,ij->i", a, a))
    m = a.max(axis=1)
    safe = np.where(m > 0, m, 1.0)
    return m * np.sum((a / safe[:, None]) ** p, axis=1) ** (1.0 / p)


def group_norm(M, inner: OrderLike, outer: OrderLike) -> float:
    """Outer norm of the vector of per-row inner norms; outer=inf gives the max row norm."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        raise ValidationError("group_norm of an empty matrix")
    return p_norm(row_norms(M, inner), outer)


def sign_vector(v) -> np.ndarray:
    return np.sign(np.asarray(v, dtype=float))


def check_symmetric(M, tol: float = SYMMETRY_TOL) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim < 2 or M.shape[-1] != M.shape[-2]:
        raise ValidationError(f"expected square matrices, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValidationError("matrix has non-finite entries")
    if np.any(np.abs(M - np.swapaxes(M, -1, -2)) > tol):
        raise ValidationError("matrix is not symmetric within 1e-12")
    return M


def max_power_iterations(d: int) -> int:
    return int(10 * d * math.log(d + 2) + 200)


def _rayleigh(B, v):
    return np.einsum("ki,ki->k", v, np.matmul(B, v[..., None])[..., 0])


def _power_on_squares(B, v0, tol, budget):
    """Power iteration on a stack of PSD matrices B with operator squaring.

    Step j replaces the iteration operator P by P @ P (rescaled), so after j
    steps the start vector has been multiplied by B^(2^j). A matrix is frozen
    once its rescaled operator stops moving by more than tol; the change per
    step grows with the eigenvalue gap, so a stop also bounds the error of the
    Rayleigh quotient by roughly tol relative. Frozen entries never see the
    rest of the batch, so results do not depend on batch composition.
    """
    k = B.shape[0]
    scale = np.abs(B).max(axis=(1, 2))
    scale[scale == 0.0] = 1.0
    P = B / scale[:, None, None]
    active = np.ones(k, dtype=bool)
    used = 0
    while active.any():
        if used >= budget:
            raise NumericalError(f"power iteration did not converge in {budget} iterations")
        used += 1
        idx = np.flatnonzero(active)
        Pa = P[idx]
        P2 = np.matmul(Pa, Pa)
        s = np.abs(P2).max(axis=(1, 2))
        s[s == 0.0] = 1.0
        P2 /= s[:, None, None]
        moved = np.abs(P2 - Pa).max(axis=(1, 2))
        P[idx] = P2
        active[idx[moved <= tol]] = False
    v = np.matmul(P, v0[..., None])[..., 0]
    nrm = np.sqrt(np.einsum("ki,ki->k", v, v))
    dead = nrm == 0.0
    v[~dead] /= nrm[~dead, None]
    v[dead] = v0[dead]
    return _rayleigh(B, v), v, used


def _restart_vectors(v):
    d = v.shape[1]
    g = (np.arange(1, d + 1) * _GOLDEN) % 1.0 - 0.5
    r = g[None, :] - np.einsum("ki,i->k", v, g)[:, None] * v
    nrm = np.linalg.norm(r, axis=1)
    # fall back to the coordinate axis least aligned with v
    bad = nrm < 1e-8
    if bad.any():
        for i in np.flatnonzero(bad):
            e = np.zeros(d)
            e[np.argmin(np.abs(v[i]))] = 1.0
            r[i] = e - v[i][np.argmin(np.abs(v[i]))] * v[i]
        nrm = np.linalg.norm(r, axis=1)
    return r / nrm[:, None]


def spectral_norms_symmetric(Ms, tol: float = 1e-10) -> np.ndarray:
    """Largest absolute eigenvalue of each symmetric matrix in a (k, d, d) stack."""
    Ms = check_symmetric(Ms)
    if Ms.ndim != 3:
        raise ValidationError("expected a (k, d, d) stack")
    k, d, _ = Ms.shape
    if k == 0:
        return np.zeros(0)
    if d == 1:
        return np.abs(Ms[:, 0, 0])
    B = np.matmul(Ms, Ms)
    B = 0.5 * (B + np.swapaxes(B, 1, 2))
    budget = max_power_iterations(d)
    v0 = np.full((k, d), 1.0 / math.sqrt(d))
    lam1, v1, used = _power_on_squares(B, v0, tol, budget)
    # one orthogonal restart catches a start vector that missed the top eigenspace
    lam2, _, _ = _power_on_squares(B, _restart_vectors(v1), tol, budget - used)
    return np.sqrt(np.maximum(np.maximum(lam1, lam2), 0.0))


def spectral_norm_symmetric(M, tol: float = 1e-10) -> float:
    M = check_symmetric(M)
    if M.ndim != 2:
        raise ValidationError("expected a single square matrix")
    return float(spectral_norms_symmetric(M[None], tol)[0])


def top_eigenvalues_symmetric(Ms, tol: float = 1e-10) -> np.ndarray:
    """Algebraically largest eigenvalue of each matrix in a stack.

    Uses the shift lambda_max(M) = ||M + c I|| - c with c = ||M||, which makes
    the shifted matrix PSD so its spectral norm is its top eigenvalue.
    """
    Ms = check_symmetric(Ms)
    c = spectral_norms_symmetric(Ms, tol)
    d = Ms.shape[-1]
    shifted = Ms + c[:, None, None] * np.eye(d)[None]
    return spectral_norms_symmetric(shifted, tol) - c


def jacobi_eigenvalues(M, tol: float = 1e-15, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending."""
    A = np.array(check_symmetric(M), dtype=float, copy=True)
    d = A.shape[0]
    fro = np.linalg.norm(A)
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(A - np.diag(np.diag(A))))
        if off <= tol * max(fro, 1e-300):
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                # a subnormal apq can push theta to inf; the rotation then vanishes
                with np.errstate(over="ignore"):
                    theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                A[p, p] -= t * apq
                A[q, q] += t * apq
                A[p, q] = A[q, p] = 0.0
                for r in range(d):
                    if r == p or r == q:
                        continue
                    arp, arq = A[r, p], A[r, q]
                    A[r, p] = A[p, r] = c * arp - s * arq
                    A[r, q] = A[q, r] = s * arp + c * arq
    else:
        raise NumericalError("Jacobi sweeps did not converge")
    return np.sort(np.diag(A))


@dataclass
class DesignMatrix:
    entries: np.ndarray
    labels: Optional[np.ndarray] = None
    feature_names: Optional[tuple] = None

    def __post_init__(self):
        X = np.asarray(self.entries, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise ValidationError(f"design matrix must be n x d with n, d >= 1, got shape {X.shape}")
        if not np.all(np.isfinite(X)):
            raise ValidationError("design matrix has non-finite entries")
        self.entries = X
        if self.labels is not None:
            y = np.asarray(self.labels, dtype=float).ravel()
            if y.shape[0] != X.shape[0]:
                raise ValidationError(f"{y.shape[0]} labels for {X.shape[0]} rows")
            if not np.all(np.isin(y, (-1.0, 1.0))):
                raise ValidationError("labels must be -1 or +1")
            self.labels = y

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def d(self) -> int:
        return self.entries.shape[1]

    def require_labels(self) -> np.ndarray:
        if self.labels is None:
            raise ValidationError("missing column 'label' (labels are required here)")
        return self.labels

    @classmethod
    def from_csv(cls, path) -> "DesignMatrix":
        path = Path(path)
        with path.open(newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        if not rows:
            raise ValidationError(f"{path}: empty file, a header row is required")
        header = [h.strip() for h in rows[0]]
        body = [r for r in rows[1:] if any(c.strip() for c in r)]
        if not body:
            raise ValidationError(f"{path}: no data rows")
        has_label = header[-1] == "label"
        if "label" in header[:-1]:
            raise ValidationError(f"{path}: column 'label' must be the last column")
        try:
            data = np.array([[float(c) for c in r] for r in body])
        except ValueError as exc:
            raise ValidationError(f"{path}: {exc}") from None
        if data.ndim != 2 or data.shape[1] != len(header):
            raise ValidationError(f"{path}: every row needs {len(header)} fields")
        if has_label:
            return cls(data[:, :-1], data[:, -1], tuple(header[:-1]))
        return cls(data, None, tuple(header))

    def to_csv(self, path) -> None:
        names = self.feature_names or tuple(f"x{j + 1}" for j in range(self.d))
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(list(names) + (["label"] if self.labels is not None else []))
            for i in range(self.n):
                row = [repr(float(v)) for v in self.entries[i]]
                if self.labels is not None:
                    row.append(str(int(self.labels[i])))
                w.writerow(row)
