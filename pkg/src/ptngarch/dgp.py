"""Data-generating process: threshold parameters, stationarity check and
panel simulation.

Each node's count is conditionally Poisson with intensity

    lam[i,t] = omega + (alpha1 if y[i,t-1] >= r else alpha2) * y[i,t-1]
               + xi * sum_j W[i,j] * y[j,t-1] + beta * lam[i,t-1]

so the autoregressive loading switches between two regimes at the integer
threshold r, neighbours enter through the row-normalized weights W, and
beta carries GARCH-style persistence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .network import Network
from .rng import Rng

COEF_NAMES = ("omega", "alpha1", "alpha2", "xi", "beta")


@dataclass(frozen=True)
class ThresholdParams:
    """Model coefficients plus the integer threshold.

    omega > 0; alpha1 (regime y >= r), alpha2 (regime y < r), xi, beta all
    >= 0; r >= 1.  Simulation and filtering additionally require beta < 1.
    """
    omega: float
    alpha1: float
    alpha2: float
    xi: float
    beta: float
    r: int

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        for name in ("alpha1", "alpha2", "xi", "beta"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative, got {getattr(self, name)}")
        if int(self.r) != self.r or self.r < 1:
            raise ValueError(f"threshold r must be a positive integer, got {self.r}")
        object.__setattr__(self, "r", int(self.r))

    @property
    def theta(self) -> np.ndarray:
        """Continuous coefficient vector (omega, alpha1, alpha2, xi, beta)."""
        return np.array([self.omega, self.alpha1, self.alpha2, self.xi, self.beta])

    @classmethod
    def from_theta(cls, theta, r: int) -> "ThresholdParams":
        return cls(*[float(v) for v in theta], r=int(r))


@dataclass(frozen=True)
class StationarityReport:
    """Evaluation of the sufficient stationarity condition.

    alpha_star = max(alpha1, alpha2, |alpha1*r - alpha2*(r-1)|); the process
    admits a strictly stationary solution with finite first moment whenever
    alpha_star + xi + beta < 1.  The condition is sufficient, not necessary.
    """
    alpha_star: float
    total: float
    satisfied: bool


class IntensityExplosionError(RuntimeError):
    def __init__(self, node: int, time: int, cap: float):
        self.node = node
        self.time = time
        super().__init__(
            f"intensity exceeded cap {cap:g} at node {node}, time step {time}; "
            "the parameter configuration appears explosive")


def check_stationarity(params: ThresholdParams) -> StationarityReport:
    cross = abs(params.alpha1 * params.r - params.alpha2 * (params.r - 1))
    alpha_star = max(params.alpha1, params.alpha2, cross)
    total = alpha_star + params.xi + params.beta
    return StationarityReport(alpha_star=alpha_star, total=total,
                              satisfied=bool(total < 1.0))


def poisson_sample(lam: float, rng: Rng) -> int:
    """One Poisson draw with mean ``lam`` from the given stream."""
    return rng.poisson(lam)


def simulate(params: ThresholdParams, net: Network, t_len: int,
             burn_in: int = 500, seed: int = 0,
             return_intensities: bool = False, explosion_cap: float = 1e9):
    """Simulate a counts panel of length ``t_len`` after ``burn_in`` steps.

    The recursion starts from the no-feedback fixed point
    lam[i,0] = omega / (1 - beta).  Simulation proceeds whether or not the
    sufficient stationarity condition holds; if any intensity exceeds
    ``explosion_cap`` an :class:`IntensityExplosionError` identifies the
    first offending (node, time).

    Returns the panel (and the matching intensity paths when
    ``return_intensities`` is set).
    """
    from .likelihood import Panel

    if params.beta >= 1:
        raise ValueError(f"simulation requires beta < 1, got beta={params.beta}")
    if t_len < 2:
        raise ValueError(f"panel length must be at least 2, got {t_len}")
    if burn_in < 0:
        raise ValueError("burn_in must be nonnegative")
    t_total = t_len + burn_in
    lam_init = np.full(net.n_nodes, params.omega / (1.0 - params.beta))
    state = np.uint64(Rng(seed).seed & ((1 << 64) - 1))
    y, lam, err_i, err_t, _ = _kernels.simulate_kernel(
        params.omega, params.alpha1, params.alpha2, params.xi, params.beta,
        params.r, np.ascontiguousarray(net.weights, dtype=np.float64),
        t_total, lam_init, float(explosion_cap), state)
    if err_i >= 0:
        raise IntensityExplosionError(int(err_i), int(err_t) - burn_in,
                                      explosion_cap)
    panel = Panel(counts=np.ascontiguousarray(y[:, burn_in:]))
    if return_intensities:
        return panel, np.ascontiguousarray(lam[:, burn_in:])
    return panel
