"""Divisive normalization of DCT blocks, its inverse and its Jacobian.

Responses are computed coefficient-wise as::

    r_f = sgn(y_f) |a_f y_f|^g / (b_f + sum_f' H[f, f'] |a_f' y_f'|^g)

with CSF weights ``a``, saturation constants ``b``, exponent ``g`` and a
row-stochastic Gaussian interaction matrix ``H``.
"""
from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import SingularSystem, ZeroMatrix
from .transform import (CSF_FLOOR, DEFAULT_VIEW, N, ViewingGeometry, csf_weights,
                        frequency_vectors)

NF = N * N

DEFAULT_GAMMA = 2.0
DEFAULT_BETA = 0.1
DEFAULT_C0 = 0.5
DEFAULT_C1 = 0.2


def build_interaction_matrix(view: ViewingGeometry = DEFAULT_VIEW,
                             c0: float = DEFAULT_C0, c1: float = DEFAULT_C1,
                             normalize: bool = True) -> np.ndarray:
    """Gaussian neighbourhoods in 2-D frequency whose width grows as ``c0 + c1*|f|``."""
    if not c0 > 0 or c1 < 0:
        raise ValueError("need c0 > 0 and c1 >= 0")
    fv = frequency_vectors(view)
    width = c0 + c1 * np.linalg.norm(fv, axis=1)
    d2 = ((fv[:, None, :] - fv[None, :, :]) ** 2).sum(-1)
    h = np.exp(-d2 / (2.0 * width[:, None] ** 2))
    if normalize:
        h /= h.sum(axis=1, keepdims=True)
    return h


@dataclass(frozen=True)
class NormParams:
    alpha: np.ndarray = field(repr=False)
    beta: np.ndarray = field(repr=False)
    gamma: float = DEFAULT_GAMMA
    H: np.ndarray = field(default=None, repr=False)
    # provenance of the defaults, kept so a parameter file can be round-tripped
    c0: float = DEFAULT_C0
    c1: float = DEFAULT_C1
    csf_floor: float = CSF_FLOOR
    view: ViewingGeometry = DEFAULT_VIEW

    def __post_init__(self):
        alpha = np.array(self.alpha, dtype=np.float64).reshape(NF)
        beta = np.array(self.beta, dtype=np.float64).reshape(NF)
        H = np.array(self.H, dtype=np.float64).reshape(NF, NF)
        if np.any(alpha <= 0) or np.any(beta <= 0):
            raise ValueError("alpha and beta must be strictly positive")
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if np.any(H < 0) or not np.allclose(H.sum(axis=1), 1.0, rtol=0, atol=1e-9):
            raise ValueError("H must be non-negative with unit row sums")
        for a in (alpha, beta, H):
            a.flags.writeable = False
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "H", H)

    @classmethod
    def default(cls, view: ViewingGeometry = DEFAULT_VIEW, *, gamma=DEFAULT_GAMMA,
                beta_default=DEFAULT_BETA, c0=DEFAULT_C0, c1=DEFAULT_C1,
                csf_floor=CSF_FLOOR, alpha=None, beta=None) -> "NormParams":
        if alpha is None:
            alpha = csf_weights(view, csf_floor).ravel()
        if beta is None:
            beta = np.full(NF, float(beta_default))
        return cls(alpha=alpha, beta=beta, gamma=float(gamma),
                   H=build_interaction_matrix(view, c0, c1), c0=c0, c1=c1,
                   csf_floor=csf_floor, view=view)

    def with_interaction(self, H) -> "NormParams":
        return NormParams(self.alpha, self.beta, self.gamma, H, self.c0, self.c1,
                          self.csf_floor, self.view)

    def digest(self) -> bytes:
        """8-byte fingerprint written into bitstream headers."""
        h = hashlib.sha256()
        h.update(struct.pack("<dd", self.gamma, self.view.samples_per_degree))
        for a in (self.alpha, self.beta, self.H):
            h.update(np.ascontiguousarray(a, dtype="<f8").tobytes())
        return h.digest()[:8]


def _flat(y):
    y = np.asarray(y, dtype=np.float64)
    if y.shape[-2:] == (N, N):
        return y.reshape(y.shape[:-2] + (NF,)), True
    if y.shape[-1] != NF:
        raise ValueError(f"expected trailing shape (16, 16) or (256,), got {y.shape}")
    return y, False


def normalize_forward(y, p: NormParams) -> np.ndarray:
    """Responses for one block or a stack of blocks; output keeps the input shape."""
    flat, square = _flat(y)
    e = np.abs(p.alpha * flat) ** p.gamma
    r = np.sign(flat) * e / (p.beta + e @ p.H.T)
    return r.reshape(np.shape(y)) if square else r


def normalize_inverse(r, p: NormParams) -> np.ndarray:
    """Invert :func:`normalize_forward` by solving ``(I - D|r| H) e = D|r| b``."""
    flat, square = _flat(r)
    a = np.abs(flat)
    eye = np.eye(NF)
    M = eye - a[..., :, None] * p.H
    rhs = a * p.beta
    try:
        e = np.linalg.solve(M, rhs[..., None])[..., 0]
    except np.linalg.LinAlgError as exc:
        raise SingularSystem("response outside the range of the normalization") from exc
    if not np.all(np.isfinite(e)):
        raise SingularSystem("non-finite energies from inverse solve")
    # energies are non-negative for any response the forward map can produce
    tol = 1e-9 * np.maximum(np.abs(e).max(axis=-1, keepdims=True), 1.0)
    if np.any(e < -tol):
        raise SingularSystem("response outside the range of the normalization")
    e = np.maximum(e, 0.0)
    y = np.sign(flat) * e ** (1.0 / p.gamma) / p.alpha
    return y.reshape(np.shape(r)) if square else y


def normalize_jacobian(y, p: NormParams) -> np.ndarray:
    """256x256 matrix of d r_f / d y_f'.

    The cross term carries ``sgn(y_f) sgn(y_f')`` so the result is valid for
    coefficients of either sign.
    """
    flat, _ = _flat(y)
    if flat.ndim != 1:
        raise ValueError("jacobian takes a single block")
    g = p.gamma
    ay = np.abs(p.alpha * flat)
    e = ay ** g
    denom = p.beta + p.H @ e
    s = np.sign(flat)
    # d e_f / d y_f = g * alpha_f * |alpha_f y_f|^(g-1) * sgn(y_f)
    de = g * p.alpha * ay ** (g - 1.0)
    J = -np.outer(s * e / denom ** 2, s * de) * p.H
    J[np.diag_indices(NF)] += de / denom
    return J


def diagonality_ratio(J) -> float:
    """Share of absolute Jacobian mass lying off the diagonal (0 = diagonal)."""
    J = np.abs(np.asarray(J, dtype=np.float64))
    if J.ndim != 2 or J.shape[0] != J.shape[1]:
        raise ValueError("diagonality_ratio needs a square matrix")
    total = J.sum()
    if total == 0:
        raise ZeroMatrix("all-zero matrix has no diagonality")
    # row sums minus their own diagonal entry: exactly zero for a diagonal matrix
    off = (J.sum(axis=1) - np.diagonal(J)).sum()
    return float(off / total)


# --- parameter files -------------------------------------------------------

_SCALARS = ("gamma", "beta_default", "c0", "c1", "csf_floor", "samples_per_degree")


def parse_params(text: str) -> NormParams:
    """Read ``key=value`` lines; ``alpha``/``beta`` may carry 256 comma-separated reals."""
    kw = {}
    vectors = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in _SCALARS:
            kw[key] = float(value)
        elif key in ("alpha", "beta"):
            vec = np.array([float(v) for v in value.split(",") if v.strip()])
            if vec.size != NF:
                raise ValueError(f"line {lineno}: {key} needs {NF} values, got {vec.size}")
            vectors[key] = vec
        else:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
    view = ViewingGeometry(kw.pop("samples_per_degree", DEFAULT_VIEW.samples_per_degree))
    return NormParams.default(view, **kw, **vectors)


def format_params(p: NormParams, with_vectors: bool = False) -> str:
    beta0 = float(p.beta[0])
    lines = [f"gamma={p.gamma!r}", f"beta_default={beta0!r}", f"c0={p.c0!r}",
             f"c1={p.c1!r}", f"csf_floor={p.csf_floor!r}",
             f"samples_per_degree={p.view.samples_per_degree!r}"]
    if with_vectors or not np.all(p.beta == beta0):
        lines.append("beta=" + ",".join(repr(float(v)) for v in p.beta))
    if with_vectors:
        lines.append("alpha=" + ",".join(repr(float(v)) for v in p.alpha))
    return "\n".join(lines) + "\n"


def load_params(path=None) -> NormParams:
    if path is None:
        return NormParams.default()
    return parse_params(Path(path).read_text())


def normalize_inverse_fixed(r, p: NormParams, fixed, fixed_y) -> np.ndarray:
    """Inverse where coefficients in boolean mask ``fixed`` are known in y.

    The known energies move to the right-hand side and only the remaining
    coefficients are solved for; ``r`` at fixed positions is ignored. Works on
    a single block or a stack of blocks sharing the same mask.
    """
    flat, square = _flat(r)
    fixed = np.asarray(fixed, dtype=bool).reshape(NF)
    fy, _ = _flat(fixed_y)
    free = ~fixed
    a = np.abs(flat[..., free])
    e_fix = np.abs(p.alpha[fixed] * fy[..., fixed]) ** p.gamma
    H_uu = p.H[np.ix_(free, free)]
    H_uf = p.H[np.ix_(free, fixed)]
    M = np.eye(a.shape[-1]) - a[..., :, None] * H_uu
    rhs = a * (p.beta[free] + e_fix @ H_uf.T)
    try:
        e = np.linalg.solve(M, rhs[..., None])[..., 0]
    except np.linalg.LinAlgError as exc:
        raise SingularSystem("response outside the range of the normalization") from exc
    if not np.all(np.isfinite(e)):
        raise SingularSystem("non-finite energies from inverse solve")
    y = np.empty_like(flat)
    y[..., fixed] = fy[..., fixed]
    y[..., free] = np.sign(flat[..., free]) * np.maximum(e, 0.0) ** (1.0 / p.gamma) / p.alpha[free]
    return y.reshape(np.shape(r)) if square else y
