"""Filtered intensities, (approximate) log-likelihood, and its analytic
first and second derivatives.

Because the pre-sample intensities are unobservable, filtering starts from
configurable initial values (zero by default) and the likelihood sums over
t >= 1 only; with T observed columns the effective sample is N * (T - 1),
and that per-observation mean scaling is used throughout.  The derivative
recursions share the filter's structure:

    d(lam_it)        = h_{i,t-1} + beta * d(lam_{i,t-1})
    h_{i,t-1}        = (1, y 1{y>=r}, y 1{y<r}, (W y)_i, lam_{i,t-1})'
    d2(lam_it)       = beta * d2(lam_{i,t-1}) + e_b d(lam_{i,t-1})' +
                       d(lam_{i,t-1}) e_b'          (e_b marks beta)

so second derivatives of lam vanish outside the beta row/column.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .dgp import ThresholdParams
from .network import Network


@dataclass(frozen=True)
class Panel:
    """N x T matrix of nonnegative integer counts, time along axis 1."""
    counts: np.ndarray
    node_ids: tuple[str, ...] | None = None

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.ndim != 2:
            raise ValueError(f"counts must be 2-d (nodes x time), got shape {counts.shape}")
        if not np.issubdtype(counts.dtype, np.integer):
            if not np.all(counts == np.floor(counts)):
                raise ValueError("counts must be integers")
            counts = counts.astype(np.int64)
        if (counts < 0).any():
            i, t = np.argwhere(counts < 0)[0]
            raise ValueError(f"negative count {counts[i, t]} at node {i}, time {t}")
        object.__setattr__(self, "counts", np.ascontiguousarray(counts, dtype=np.int64))
        if self.node_ids is not None and len(self.node_ids) != counts.shape[0]:
            raise ValueError("node_ids length does not match the number of rows")
        self.counts.setflags(write=False)

    @property
    def n_nodes(self) -> int:
        return self.counts.shape[0]

    @property
    def t_len(self) -> int:
        return self.counts.shape[1]


@dataclass(frozen=True)
class IntensitySurface:
    """Filtered intensities and, optionally, their derivative paths."""
    lambdas: np.ndarray                 # (N, T)
    grads: np.ndarray | None = None     # (N, T, 5)
    hess_beta_cols: np.ndarray | None = None  # (N, T, 5): beta column of d2(lam)

    @property
    def hessians(self) -> np.ndarray:
        """Full (N, T, 5, 5) second-derivative array; zero outside the beta
        row/column by the structure of the recursion."""
        if self.hess_beta_cols is None:
            raise ValueError("surface was computed without hessians")
        n, t_len, _ = self.hess_beta_cols.shape
        full = np.zeros((n, t_len, 5, 5))
        full[:, :, :, 4] = self.hess_beta_cols
        full[:, :, 4, :] = self.hess_beta_cols
        return full


def _check_dims(panel: Panel, net: Network) -> None:
    if panel.n_nodes != net.n_nodes:
        raise ValueError(
            f"panel has {panel.n_nodes} nodes but network has {net.n_nodes}")


def _design(panel: Panel, net: Network, r: int):
    """Per-threshold data arrays consumed by the kernels: counts as floats,
    the two regime splits, and the neighbour averages W y."""
    y = np.ascontiguousarray(panel.counts, dtype=np.float64)
    upper = y >= r
    x1 = np.where(upper, y, 0.0)
    x2 = np.where(upper, 0.0, y)
    z = np.ascontiguousarray(net.weights @ y)
    return y, x1, x2, z


def _lambda0(panel: Panel, lambda0) -> np.ndarray:
    if lambda0 is None:
        return np.zeros(panel.n_nodes)
    arr = np.ascontiguousarray(lambda0, dtype=np.float64)
    if arr.shape == ():
        arr = np.full(panel.n_nodes, float(arr))
    if arr.shape != (panel.n_nodes,):
        raise ValueError(f"lambda0 must have one entry per node, got shape {arr.shape}")
    if (arr < 0).any():
        raise ValueError("initial intensities must be nonnegative")
    return arr


def _effective_nt(panel: Panel) -> int:
    return panel.n_nodes * (panel.t_len - 1)


def filter_intensities(params: ThresholdParams, panel: Panel, net: Network,
                       lambda0=None, grads: bool = False,
                       hessians: bool = False) -> IntensitySurface:
    """Run the intensity recursion over the panel.

    ``lambda0`` sets the t = 0 intensities (default all zeros).  With
    ``grads``/``hessians`` the analytic derivative recursions are stored
    alongside; derivatives of the initial values are zero.
    """
    _check_dims(panel, net)
    if params.beta >= 1:
        raise ValueError(f"filtering requires beta < 1, got beta={params.beta}")
    y, x1, x2, z = _design(panel, net, params.r)
    lam0 = _lambda0(panel, lambda0)
    want_grad = bool(grads or hessians)
    lam, g, m = _kernels.filter_kernel(
        params.omega, params.alpha1, params.alpha2, params.xi, params.beta,
        y, x1, x2, z, lam0, want_grad, bool(hessians))
    return IntensitySurface(
        lambdas=lam,
        grads=g if grads else None,
        hess_beta_cols=m if hessians else None)


def lambda_closed_form(params: ThresholdParams, panel: Panel, net: Network,
                       k_trunc: int) -> np.ndarray:
    """Independent oracle for the filter: intensities as an explicit
    geometric sum over past innovations,

        lam_it = sum_{k=1..min(K, t)} beta^(k-1) *
                 [omega + alpha_{regime} y_{i,t-k} + xi (W y)_{i,t-k}]

    which equals the recursion exactly when the filter starts from zero.
    """
    if k_trunc < 1:
        raise ValueError(f"truncation depth must be >= 1, got {k_trunc}")
    _check_dims(panel, net)
    y, x1, x2, z = _design(panel, net, params.r)
    u = params.omega + params.alpha1 * x1 + params.alpha2 * x2 + params.xi * z
    n, t_len = y.shape
    lam = np.zeros((n, t_len))
    for t in range(1, t_len):
        kmax = min(k_trunc, t)
        powers = params.beta ** np.arange(kmax, dtype=float)
        lam[:, t] = u[:, t - kmax:t][:, ::-1] @ powers
    return lam


def _acc(params: ThresholdParams, panel: Panel, net: Network, lambda0, order: int):
    _check_dims(panel, net)
    if params.beta >= 1:
        raise ValueError(f"filtering requires beta < 1, got beta={params.beta}")
    y, x1, x2, z = _design(panel, net, params.r)
    lam0 = _lambda0(panel, lambda0)
    return _kernels.acc_kernel(
        params.omega, params.alpha1, params.alpha2, params.xi, params.beta,
        y, x1, x2, z, lam0, order)


def log_likelihood(params: ThresholdParams, panel: Panel, net: Network,
                   lambda0=None, total: bool = False) -> float:
    """Mean per-observation log-likelihood (constant terms dropped):
    (1 / (N (T-1))) * sum_{i, t>=1} [y log(lam) - lam].  With ``total``
    the unscaled sum is returned instead."""
    ll, _, _, _, _ = _acc(params, panel, net, lambda0, order=0)
    if total:
        return float(ll)
    return float(ll / _effective_nt(panel))


def score(params: ThresholdParams, panel: Panel, net: Network,
          lambda0=None) -> np.ndarray:
    """Analytic gradient of the mean log-likelihood w.r.t.
    (omega, alpha1, alpha2, xi, beta)."""
    _, sc, _, _, _ = _acc(params, panel, net, lambda0, order=1)
    return sc / _effective_nt(panel)


def hessian(params: ThresholdParams, panel: Panel, net: Network,
            lambda0=None) -> np.ndarray:
    """Analytic 5x5 Hessian of the mean log-likelihood; symmetric by
    construction (each off-diagonal pair is computed once)."""
    _, _, hv, gg, _ = _acc(params, panel, net, lambda0, order=2)
    hess = -gg
    hess[:, 4] += hv
    hess[4, :] += hv
    hess[4, 4] -= hv[4]
    return hess / _effective_nt(panel)


def score_hessian_info(params: ThresholdParams, panel: Panel, net: Network,
                       lambda0=None):
    """One-pass (loglik, score, hessian, information) at a parameter point."""
    ll, sc, hv, gg, fi = _acc(params, panel, net, lambda0, order=2)
    nt = _effective_nt(panel)
    hess = -gg
    hess[:, 4] += hv
    hess[4, :] += hv
    hess[4, 4] -= hv[4]
    return float(ll / nt), sc / nt, hess / nt, fi / nt
