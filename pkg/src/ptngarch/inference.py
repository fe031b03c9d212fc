"""Wald tests of linear restrictions on the coefficient vector.

For a restriction matrix G (s x 5, full row rank) and target vector eta,
the statistic is

    W = (G theta_hat - eta)' [ (1/NT) G Sigma_hat^{-1} G' ]^{-1}
        (G theta_hat - eta)

with NT the effective sample size and Sigma_hat the estimated information;
under the null W is asymptotically chi-square with s degrees of freedom.
Three canned restrictions cover the usual questions: equal regime loadings
(threshold effect), beta = 0 (persistence) and xi = 0 (network effect).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._linalg import SingularMatrixError, chol_factor, chol_inverse, chol_solve, row_rank
from .dgp import COEF_NAMES
from .estimate import FitResult, SingularInformationError
from .special import chi2_sf

__all__ = ["WaldSpec", "WaldResult", "wald_test", "threshold_test",
           "garch_test", "network_test", "chi2_sf"]

_RANK_TOL = 1e-10


@dataclass(frozen=True)
class WaldSpec:
    """Linear restriction gamma @ theta = eta with a descriptive label."""
    gamma: np.ndarray
    eta: np.ndarray
    label: str = ""

    def __post_init__(self):
        gamma = np.atleast_2d(np.asarray(self.gamma, dtype=float))
        eta = np.atleast_1d(np.asarray(self.eta, dtype=float))
        if gamma.shape[1] != 5:
            raise ValueError(f"restriction matrix must have 5 columns, got {gamma.shape}")
        s = gamma.shape[0]
        if not 1 <= s <= 5:
            raise ValueError(f"number of restrictions must be in [1, 5], got {s}")
        if eta.shape != (s,):
            raise ValueError(f"eta must have {s} entries, got shape {eta.shape}")
        if row_rank(gamma, _RANK_TOL) != s:
            raise ValueError("restriction matrix is rank deficient")
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "eta", eta)

    @property
    def n_restrictions(self) -> int:
        return self.gamma.shape[0]


@dataclass(frozen=True)
class WaldResult:
    statistic: float
    df: int
    p_value: float
    label: str = ""
    warnings: tuple[str, ...] = field(default=())


def wald_test(result: FitResult, spec: WaldSpec) -> WaldResult:
    """Evaluate the Wald statistic for a linear restriction at a fit point.

    Raises :class:`SingularInformationError` when the information matrix
    cannot be inverted, and ValueError for a rank-deficient restriction.
    """
    gamma, eta = spec.gamma, spec.eta
    s = spec.n_restrictions
    try:
        low = chol_factor(result.sigma_hat, labels=list(COEF_NAMES))
    except SingularMatrixError as err:
        raise SingularInformationError(COEF_NAMES[err.index], err.pivot) from err
    sigma_inv = chol_inverse(low)
    inner = gamma @ sigma_inv @ gamma.T / result.effective_nt
    diff = gamma @ result.theta_hat - eta
    try:
        inner_low = chol_factor(0.5 * (inner + inner.T))
    except SingularMatrixError as err:
        raise SingularInformationError(f"restriction row {err.index}", err.pivot) from err
    stat = float(diff @ chol_solve(inner_low, diff))
    stat = max(stat, 0.0)

    warnings = []
    tested = np.any(gamma != 0.0, axis=0)
    at_boundary = np.asarray(result.boundary_flags, dtype=bool)
    for k in np.nonzero(tested & at_boundary)[0]:
        warnings.append(
            f"tested coefficient {COEF_NAMES[k]!r} sits on the parameter "
            "boundary; the chi-square limit assumes an interior point")
    return WaldResult(statistic=stat, df=s, p_value=chi2_sf(stat, s),
                      label=spec.label, warnings=tuple(warnings))


THRESHOLD_SPEC = WaldSpec(
    gamma=np.array([[0.0, 1.0, -1.0, 0.0, 0.0]]), eta=np.zeros(1),
    label="threshold effect: alpha1 = alpha2")
GARCH_SPEC = WaldSpec(
    gamma=np.array([[0.0, 0.0, 0.0, 0.0, 1.0]]), eta=np.zeros(1),
    label="garch effect: beta = 0 (one-sided alternative beta > 0)")
NETWORK_SPEC = WaldSpec(
    gamma=np.array([[0.0, 0.0, 0.0, 1.0, 0.0]]), eta=np.zeros(1),
    label="network effect: xi = 0 (one-sided alternative xi > 0)")


def threshold_test(result: FitResult) -> WaldResult:
    """Equality of the two regime loadings (no asymmetry)."""
    return wald_test(result, THRESHOLD_SPEC)


def garch_test(result: FitResult) -> WaldResult:
    """No persistence term: beta = 0.  The chi-square p-value is two-sided
    as for every restriction here; the one-sided nature of the natural
    alternative is recorded in the label only."""
    return wald_test(result, GARCH_SPEC)


def network_test(result: FitResult) -> WaldResult:
    """No network spillover: xi = 0."""
    return wald_test(result, NETWORK_SPEC)
