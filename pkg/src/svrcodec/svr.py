"""Bias-free epsilon-insensitive SVR solved by exact dual coordinate ascent.

Without a bias term the dual has no equality constraint::

    max_w  -1/2 w'Kw + w't - sum_k eps_k |w_k|    s.t. |w_k| <= C

so each coordinate has a closed-form maximiser (a soft threshold against
``eps_k`` followed by clipping to the box). Sweeps run in the fixed order of
the training samples, which makes fits deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import NoConvergence

DEFAULT_C = 1e6
DEFAULT_TOL = 1e-4
MAX_SWEEPS = 2000
FACE_STEPS = 32


@dataclass(frozen=True)
class TrainingSet:
    inputs: np.ndarray  # (n, 2)
    targets: np.ndarray  # (n,)
    eps: np.ndarray  # (n,)

    def __post_init__(self):
        x = np.asarray(self.inputs, dtype=np.float64).reshape(-1, 2)
        t = np.asarray(self.targets, dtype=np.float64).reshape(-1)
        e = np.broadcast_to(np.asarray(self.eps, dtype=np.float64), t.shape).copy()
        if x.shape[0] != t.size:
            raise ValueError("inputs and targets differ in length")
        if np.any(e <= 0):
            raise ValueError("every eps_k must be positive")
        object.__setattr__(self, "inputs", x)
        object.__setattr__(self, "targets", t)
        object.__setattr__(self, "eps", e)

    def __len__(self):
        return self.targets.size


@dataclass(frozen=True)
class SvrModel:
    sigma: float
    support: np.ndarray  # (m, 2) support-vector positions
    weights: np.ndarray  # (m,) non-zero dual weights
    eps_used: np.ndarray = field(repr=False)
    # solver diagnostics
    sweeps: int = 0
    violation: float = 0.0
    objective: np.ndarray = field(default=None, repr=False)  # per sweep
    support_index: np.ndarray = field(default=None, repr=False)  # rows of the training set

    @property
    def n_support(self) -> int:
        return int(self.weights.size)


def rbf_kernel(a, b, sigma: float) -> float:
    """exp(-|a - b|^2 / (2 sigma^2))."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    d = np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)
    return float(np.exp(-np.dot(d, d) / (2.0 * sigma * sigma)))


def gram(x, z, sigma: float) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).reshape(-1, 2)
    z = np.asarray(z, dtype=np.float64).reshape(-1, 2)
    d2 = ((x[:, None, :] - z[None, :, :]) ** 2).sum(-1)
    return np.exp(-d2 / (2.0 * sigma * sigma))


@njit(cache=True)
def _kkt_violation(w, g, eps, C):
    worst = 0.0
    for k in range(w.size):
        wk = w[k]
        gk = g[k]
        ek = eps[k]
        if wk == 0.0:
            v = abs(gk) - ek
        elif wk >= C:
            v = ek - gk
        elif wk <= -C:
            v = gk + ek
        elif wk > 0.0:
            v = abs(gk - ek)
        else:
            v = abs(gk + ek)
        if v > worst:
            worst = v
    return worst


@njit(cache=True)
def _dual_objective(w, f, t, eps):
    s = 0.0
    for k in range(w.size):
        s += -0.5 * w[k] * f[k] + w[k] * t[k] - eps[k] * abs(w[k])
    return s


@njit(cache=True)
def _refresh(K, w, f):
    n = w.size
    for j in range(n):
        acc = 0.0
        for k in range(n):
            acc += K[j, k] * w[k]
        f[j] = acc


@njit(cache=True)
def _sweep(K, t, eps, C, w, f):
    n = t.size
    for k in range(n):
        kkk = K[k, k]
        # residual of coordinate k with its own contribution removed
        z = t[k] - f[k] + kkk * w[k]
        if z > eps[k]:
            wn = (z - eps[k]) / kkk
        elif z < -eps[k]:
            wn = (z + eps[k]) / kkk
        else:
            wn = 0.0
        if wn > C:
            wn = C
        elif wn < -C:
            wn = -C
        d = wn - w[k]
        if d != 0.0:
            w[k] = wn
            for j in range(n):
                f[j] += d * K[j, k]


@njit(cache=True)
def _face_step(K, t, eps, C, w, f):
    """Move toward the exact maximiser on the current sign pattern.

    With the signs of the free non-zero weights fixed the objective is a
    smooth concave quadratic. Two candidates are tried: the segment toward its
    maximiser cut where the first weight reaches zero or the box (never
    decreases the objective), and the maximiser projected onto the sign
    pattern. The better one is kept if it improves. Returns True once no
    further progress is possible on this face.
    """
    n = w.size
    m = 0
    for k in range(n):
        if w[k] != 0.0 and abs(w[k]) < C:
            m += 1
    if m == 0:
        return True
    idx = np.empty(m, dtype=np.int64)
    m = 0
    for k in range(n):
        if w[k] != 0.0 and abs(w[k]) < C:
            idx[m] = k
            m += 1
    A = np.empty((m, m))
    b = np.empty(m)
    for a in range(m):
        ka = idx[a]
        sgn = 1.0 if w[ka] > 0.0 else -1.0
        # rhs excludes the free set's own contribution
        acc = t[ka] - sgn * eps[ka] - f[ka]
        for c in range(m):
            A[a, c] = K[ka, idx[c]]
            acc += K[ka, idx[c]] * w[idx[c]]
        b[a] = acc
    # tiny ridge keeps a rank-deficient face solvable
    for a in range(m):
        A[a, a] += 1e-12
    v = np.linalg.solve(A, b)
    for a in range(m):
        if not np.isfinite(v[a]):
            return True
    tau = 1.0
    hit = -1
    for a in range(m):
        wa = w[idx[a]]
        d = v[a] - wa
        if d == 0.0:
            continue
        if wa > 0.0:
            lim = -wa / d if d < 0.0 else (C - wa) / d
        else:
            lim = -wa / d if d > 0.0 else (-C - wa) / d
        if lim < tau:
            tau = lim
            hit = a
    base = _dual_objective(w, f, t, eps)
    if hit < 0:
        wv = w.copy()
        for a in range(m):
            wv[idx[a]] = v[a]
        fv = np.zeros(n)
        _refresh(K, wv, fv)
        if _dual_objective(wv, fv, t, eps) > base:
            w[:] = wv
            f[:] = fv
        return True
    # candidate 1: projection of the face maximiser onto the sign pattern
    wp = w.copy()
    for a in range(m):
        k = idx[a]
        va = v[a]
        if (va > 0.0) != (w[k] > 0.0):
            va = 0.0
        wp[k] = min(max(va, -C), C)
    fp = np.zeros(n)
    _refresh(K, wp, fp)
    obj_p = _dual_objective(wp, fp, t, eps)
    # candidate 2: segment cut at the first boundary
    wt = w.copy()
    for a in range(m):
        k = idx[a]
        wt[k] = w[k] + tau * (v[a] - w[k])
    k = idx[hit]
    if abs(wt[k]) < 0.5 * C:
        wt[k] = 0.0
    else:
        wt[k] = C if wt[k] > 0.0 else -C
    ft = np.zeros(n)
    _refresh(K, wt, ft)
    obj_t = _dual_objective(wt, ft, t, eps)
    if obj_p >= obj_t and obj_p > base:
        w[:] = wp
        f[:] = fp
        return False
    if obj_t > base:
        w[:] = wt
        f[:] = ft
        return False
    return True


@njit(cache=True)
def _coordinate_ascent(K, t, eps, C, tol, max_sweeps, history, accelerate):
    n = t.size
    w = np.zeros(n)
    f = np.zeros(n)  # f = K @ w, kept incrementally
    sweeps = 0
    viol = _kkt_violation(w, t - f, eps, C)
    history[0] = 0.0
    while viol >= tol and sweeps < max_sweeps:
        _sweep(K, t, eps, C, w, f)
        sweeps += 1
        if sweeps % 64 == 0:
            _refresh(K, w, f)
        if accelerate:
            for _ in range(FACE_STEPS):
                if _face_step(K, t, eps, C, w, f):
                    break
        history[sweeps] = _dual_objective(w, f, t, eps)
        viol = _kkt_violation(w, t - f, eps, C)
    return w, sweeps, viol


def fit_svr(data: TrainingSet, sigma: float, C: float = DEFAULT_C, *,
            tol: float = DEFAULT_TOL, max_sweeps: int = MAX_SWEEPS,
            raise_on_failure: bool = True, accelerate: bool = True) -> SvrModel:
    if not sigma > 0 or not C > 0:
        raise ValueError("sigma and C must be positive")
    n = len(data)
    history = np.zeros(max_sweeps + 1)
    if n == 0:
        return SvrModel(float(sigma), np.zeros((0, 2)), np.zeros(0), data.eps,
                        0, 0.0, history[:1], np.zeros(0, dtype=np.intp))
    K = gram(data.inputs, data.inputs, sigma)
    w, sweeps, viol = _coordinate_ascent(K, data.targets, data.eps, float(C),
                                         float(tol), int(max_sweeps), history,
                                         bool(accelerate))
    if viol >= tol and raise_on_failure:
        raise NoConvergence(
            f"KKT violation {viol:.3g} after {sweeps} sweeps (sigma={sigma})",
            violation=viol)
    idx = np.flatnonzero(w)
    return SvrModel(float(sigma), data.inputs[idx].copy(), w[idx].copy(), data.eps,
                    sweeps, float(viol), history[:sweeps + 1].copy(), idx)


def predict_svr(model: SvrModel, queries) -> np.ndarray:
    """f(x) = sum_k w_k K(x_k, x); no bias."""
    q = np.asarray(queries, dtype=np.float64).reshape(-1, 2)
    if model.n_support == 0:
        return np.zeros(q.shape[0])
    return gram(q, model.support, model.sigma) @ model.weights
