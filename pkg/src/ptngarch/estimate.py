"""Two-step maximum likelihood: box-constrained quasi-Newton in the
continuous coefficients for each candidate threshold, then a profile over
the integer threshold grid; Fisher information, standard errors and
confidence intervals at the selected point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import _kernels
from ._linalg import SingularMatrixError, chol_factor, chol_inverse
from .dgp import COEF_NAMES, ThresholdParams
from .likelihood import Panel, _design, _effective_nt, _lambda0, score_hessian_info
from .network import Network
from .rng import Rng, derive_seed
from .special import norm_ppf


class SingularInformationError(RuntimeError):
    """Estimated information matrix is singular; the coordinate of the first
    failing pivot identifies the (numerically) unidentified coefficient."""

    def __init__(self, coordinate: str, pivot: float):
        self.coordinate = coordinate
        self.pivot = pivot
        super().__init__(
            f"information matrix is singular at coefficient {coordinate!r} "
            f"(pivot {pivot:.3e}); standard errors are unavailable")


@dataclass(frozen=True)
class FitOptions:
    """Controls for the two-step fit.

    ``r_min``/``r_max`` default to the data-driven grid [1, q95] where q95 is
    the empirical 95th percentile of the pooled counts (capped at 100);
    thresholds beyond the bulk of the data are unidentifiable anyway.
    """
    r_min: int | None = None
    r_max: int | None = None
    delta: float = 1e-6          # lower bound for omega
    beta_max: float = 0.999
    coef_max: float = 50.0
    tol_grad: float = 1e-8
    max_iter: int = 500
    n_starts: int = 3
    start_jitter_seed: int | None = None

    def __post_init__(self):
        if self.r_min is not None and self.r_min < 1:
            raise ValueError("r_min must be >= 1")
        if (self.r_min is not None and self.r_max is not None
                and self.r_min > self.r_max):
            raise ValueError(f"need r_min <= r_max, got [{self.r_min}, {self.r_max}]")
        if not 0 < self.delta < self.coef_max:
            raise ValueError("delta must satisfy 0 < delta < coef_max")
        if not 0 < self.beta_max < 1:
            raise ValueError("beta_max must lie in (0, 1)")
        if self.n_starts < 1:
            raise ValueError("need at least one start")


@dataclass
class ProfilePoint:
    """Inner-fit result for one candidate threshold."""
    r: int
    theta: np.ndarray
    loglik: float
    converged: bool            # the winning start's optimizer converged
    any_start_converged: bool  # at least one start converged
    n_iter: int
    n_eval: int
    start_index: int
    message: str
    proj_grad_norm: float


@dataclass
class FitResult:
    theta_hat: np.ndarray
    r_hat: int
    loglik: float
    loglik_sum: float
    profile: list[ProfilePoint]
    sigma_hat: np.ndarray
    se: np.ndarray | None
    ci95: np.ndarray | None
    boundary_flags: np.ndarray
    effective_nt: int
    diagnostics: dict

    @property
    def params(self) -> ThresholdParams:
        return ThresholdParams.from_theta(self.theta_hat, self.r_hat)


def _bounds(opts: FitOptions):
    lower = np.array([opts.delta, 0.0, 0.0, 0.0, 0.0])
    upper = np.array([opts.coef_max] * 4 + [opts.beta_max])
    return lower, upper


def _starts(y_mean: float, opts: FitOptions) -> list[np.ndarray]:
    """Deterministic multistart points; the threshold likelihood can be
    multimodal in (alpha1, alpha2), so one balanced, one near-zero and one
    alpha-heavy start are used (optionally jittered for Monte Carlo runs)."""
    lower, upper = _bounds(opts)
    d = opts.delta
    base = [
        np.array([0.8 * y_mean, 0.1, 0.1, 0.05, 0.2]),
        np.array([max(y_mean, 10 * d), 0.01, 0.01, 0.01, 0.01]),
        np.array([max(0.2 * y_mean, 10 * d), 0.4, 0.4, 0.05, 0.2]),
    ]
    while len(base) < opts.n_starts:
        base.append(base[len(base) % 3].copy())
    starts = base[:opts.n_starts]
    if opts.start_jitter_seed is not None:
        jittered = []
        for idx, th in enumerate(starts):
            rng = Rng(derive_seed(opts.start_jitter_seed, idx))
            factors = np.array([np.exp(rng.uniform(-0.35, 0.35)) for _ in range(5)])
            jittered.append(th * factors)
        starts = jittered
    return [np.clip(th, lower, upper) for th in starts]


def _projected_grad_norm(theta, grad, lower, upper, tol=1e-9):
    """Sup-norm of the gradient with components frozen at active bounds."""
    pg = grad.copy()
    at_low = theta <= lower + tol
    at_up = theta >= upper - tol
    pg[at_low & (pg < 0)] = 0.0
    pg[at_up & (pg > 0)] = 0.0
    return float(np.max(np.abs(pg)))


def fit_theta_given_r(panel: Panel, net: Network, r: int,
                      opts: FitOptions | None = None,
                      lambda0=None) -> ProfilePoint:
    """Maximize the mean log-likelihood over the coefficient box for a fixed
    threshold, using the analytic score; best of ``n_starts`` starts wins.

    Non-convergence (across every start) is flagged on the returned point
    rather than raised; the best iterate is still reported.
    """
    opts = opts or FitOptions()
    if r < 1:
        raise ValueError(f"threshold must be >= 1, got {r}")
    y, x1, x2, z = _design(panel, net, int(r))
    lam0 = _lambda0(panel, lambda0)
    scale = 1.0 / _effective_nt(panel)
    lower, upper = _bounds(opts)
    bounds = list(zip(lower, upper))

    def nll(theta):
        ll, sc, _, _, _ = _kernels.acc_kernel(
            theta[0], theta[1], theta[2], theta[3], theta[4],
            y, x1, x2, z, lam0, 1)
        return -ll * scale, -sc * scale

    best = None
    any_converged = False
    for s_idx, th0 in enumerate(_starts(float(y.mean()), opts)):
        res = minimize(nll, th0, jac=True, method="L-BFGS-B", bounds=bounds,
                       options={"maxiter": opts.max_iter,
                                "maxfun": opts.max_iter * 10,
                                "ftol": 1e-14,
                                "gtol": opts.tol_grad,
                                "maxls": 60})
        any_converged = any_converged or bool(res.success)
        pgn = _projected_grad_norm(res.x, -res.jac, lower, upper)
        point = ProfilePoint(
            r=int(r), theta=res.x.copy(), loglik=float(-res.fun),
            converged=bool(res.success), any_start_converged=False,
            n_iter=int(res.nit), n_eval=int(res.nfev), start_index=s_idx,
            message=str(res.message), proj_grad_norm=pgn)
        if best is None or point.loglik > best.loglik:
            best = point
    best.any_start_converged = any_converged
    return best


def _default_r_grid(panel: Panel, opts: FitOptions) -> range:
    r_min = opts.r_min if opts.r_min is not None else 1
    if opts.r_max is not None:
        r_max = opts.r_max
    else:
        q95 = int(np.percentile(panel.counts, 95))
        r_max = min(max(q95, r_min), 100)
    if r_min > r_max:
        raise ValueError(f"empty threshold grid [{r_min}, {r_max}]")
    return range(r_min, r_max + 1)


def _se_and_ci(theta_hat, sigma_hat, nt: int, level: float):
    low = chol_factor(sigma_hat, labels=list(COEF_NAMES))
    cov = chol_inverse(low) / nt
    se = np.sqrt(np.diag(cov))
    z = 0.0 if level == 0 else norm_ppf(0.5 + level / 2.0)
    ci = np.column_stack([theta_hat - z * se, theta_hat + z * se])
    return se, ci


def fisher_info(params: ThresholdParams, panel: Panel, net: Network,
                lambda0=None) -> np.ndarray:
    """Empirical information matrix at a parameter point:
    (1 / (N (T-1))) * sum (1/lam) (d lam)(d lam)'; symmetric PSD."""
    _, _, _, info = score_hessian_info(params, panel, net, lambda0)
    return info


def fit(panel: Panel, net: Network, opts: FitOptions | None = None,
        lambda0=None, ci_level: float = 0.95) -> FitResult:
    """Profile the inner fit over the threshold grid and assemble estimates,
    information, standard errors and confidence intervals at the winner.

    Ties in the profile are broken toward the smallest threshold.  If the
    information matrix is singular, standard errors and intervals are left
    unset and the failing coordinate is recorded in the diagnostics.
    """
    opts = opts or FitOptions()
    grid = _default_r_grid(panel, opts)
    profile = [fit_theta_given_r(panel, net, r, opts, lambda0) for r in grid]
    logliks = np.array([p.loglik for p in profile])
    best = profile[int(np.argmax(logliks))]  # argmax takes the first max

    params_hat = ThresholdParams.from_theta(best.theta, best.r)
    loglik_mean, _, _, sigma_hat = score_hessian_info(params_hat, panel, net, lambda0)
    nt = _effective_nt(panel)

    warnings: list[str] = []
    se = ci = None
    try:
        se, ci = _se_and_ci(best.theta, sigma_hat, nt, ci_level)
    except SingularMatrixError as err:
        warnings.append(
            f"singular information matrix at coefficient "
            f"{COEF_NAMES[err.index]!r}; no standard errors")
        singular_at = COEF_NAMES[err.index]
    else:
        singular_at = None

    lower, upper = _bounds(opts)
    boundary = (np.abs(best.theta - lower) < 1e-8) | (np.abs(best.theta - upper) < 1e-8)
    flagged = not any(p.any_start_converged for p in profile)
    if flagged:
        warnings.append("no inner fit converged; estimates are best iterates")

    diagnostics = {
        "converged": best.converged,
        "all_converged": all(p.converged for p in profile),
        "flagged": flagged,
        "singular_information_at": singular_at,
        "n_nodes": panel.n_nodes,
        "t_len": panel.t_len,
        "n_over_t": panel.n_nodes / (panel.t_len - 1),
        "ci_level": ci_level,
        "warnings": warnings,
    }
    return FitResult(
        theta_hat=best.theta.copy(), r_hat=best.r,
        loglik=float(best.loglik), loglik_sum=float(best.loglik * nt),
        profile=profile, sigma_hat=sigma_hat, se=se, ci95=ci,
        boundary_flags=boundary, effective_nt=nt, diagnostics=diagnostics)


def confidence_intervals(result: FitResult, level: float = 0.95) -> np.ndarray:
    """Symmetric normal-theory intervals theta_k +- z * SE_k at any level.

    Raises :class:`SingularInformationError` (naming the coefficient of the
    smallest pivot) when the information matrix cannot be inverted.
    """
    if not 0 <= level < 1:
        raise ValueError(f"level must lie in [0, 1), got {level}")
    try:
        _, ci = _se_and_ci(result.theta_hat, result.sigma_hat,
                           result.effective_nt, level)
    except SingularMatrixError as err:
        raise SingularInformationError(COEF_NAMES[err.index], err.pivot) from err
    return ci
