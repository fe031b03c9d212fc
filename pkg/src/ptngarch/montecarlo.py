"""Replication harness: RMSE, coverage probability and threshold recovery
across network kinds and (T, N) ladders, plus Q-Q table preparation.

Per ladder point one network is generated, then ``m_reps`` independent
panels are simulated and fitted.  Every replication's seed derives from
(base_seed, ladder index, m), so results are identical no matter how the
work is distributed over the pool.  Failed fits (explosions, no convergence
from any start, singular information) are excluded from the summary
statistics and counted; a ladder row with more than 10% failures is marked
invalid.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .dgp import COEF_NAMES, IntensityExplosionError, ThresholdParams, simulate
from .estimate import FitOptions, fit
from .network import Network, generate
from .rng import derive_seed
from .special import norm_ppf

_NET_STREAM, _PANEL_STREAM, _START_STREAM = 1, 2, 3


@dataclass(frozen=True)
class ExperimentConfig:
    """One simulation study: a network recipe, a (t_len, n_nodes) ladder,
    true parameters, and fitting options shared by all replications."""
    network: dict
    nt_ladder: tuple
    true_params: ThresholdParams
    m_reps: int = 200
    base_seed: int = 0
    burn_in: int = 500
    fit_opts: FitOptions = field(default_factory=FitOptions)
    ci_level: float = 0.95

    def __post_init__(self):
        if self.m_reps < 1:
            raise ValueError("need at least one replication")
        ladder = tuple((int(t), int(n)) for t, n in self.nt_ladder)
        if not ladder:
            raise ValueError("nt_ladder must not be empty")
        object.__setattr__(self, "nt_ladder", ladder)
        if "kind" not in self.network:
            raise ValueError("network config needs a 'kind' entry")


@dataclass
class LadderRow:
    """Summary of one (t_len, n_nodes) ladder point."""
    t_len: int
    n_nodes: int
    rmse: np.ndarray
    cp: np.ndarray
    mean_r_hat: float
    n_ok: int
    n_failed: int
    valid: bool
    estimates: np.ndarray   # (n_ok, 5) per-replication theta_hat, ordered by m
    r_hats: np.ndarray      # (n_ok,)
    ses: np.ndarray         # (n_ok, 5)
    failures: list


@dataclass
class ExperimentReport:
    rows: list
    config: ExperimentConfig


def _replicate(config: ExperimentConfig, net: Network, ladder_idx: int, m: int) -> dict:
    t_len, _ = config.nt_ladder[ladder_idx]
    panel_seed = derive_seed(config.base_seed, _PANEL_STREAM, ladder_idx, m)
    start_seed = derive_seed(config.base_seed, _START_STREAM, ladder_idx, m)
    opts = replace(config.fit_opts, start_jitter_seed=start_seed)
    try:
        panel = simulate(config.true_params, net, t_len,
                         burn_in=config.burn_in, seed=panel_seed)
        result = fit(panel, net, opts, ci_level=config.ci_level)
    except IntensityExplosionError as err:
        return {"m": m, "ok": False, "reason": f"explosion: {err}"}
    except Exception as err:  # noqa: BLE001 -- a failed fit must not kill the study
        return {"m": m, "ok": False, "reason": f"{type(err).__name__}: {err}"}
    if result.diagnostics["flagged"]:
        return {"m": m, "ok": False, "reason": "no start converged"}
    if result.se is None:
        return {"m": m, "ok": False,
                "reason": f"singular information at "
                          f"{result.diagnostics['singular_information_at']}"}
    theta0 = config.true_params.theta
    hits = (result.ci95[:, 0] <= theta0) & (theta0 <= result.ci95[:, 1])
    return {"m": m, "ok": True, "theta": result.theta_hat, "r": result.r_hat,
            "se": result.se, "hits": hits}


def _summarize(config: ExperimentConfig, ladder_idx: int, outcomes: list) -> LadderRow:
    t_len, n_nodes = config.nt_ladder[ladder_idx]
    outcomes = sorted(outcomes, key=lambda o: o["m"])
    ok = [o for o in outcomes if o["ok"]]
    failures = [(o["m"], o["reason"]) for o in outcomes if not o["ok"]]
    theta0 = config.true_params.theta
    if ok:
        est = np.array([o["theta"] for o in ok])
        r_hats = np.array([o["r"] for o in ok], dtype=float)
        ses = np.array([o["se"] for o in ok])
        hits = np.array([o["hits"] for o in ok])
        rmse = np.sqrt(np.mean((est - theta0) ** 2, axis=0))
        cp = hits.mean(axis=0)
        mean_r = float(r_hats.mean())
    else:
        est = np.zeros((0, 5))
        r_hats = np.zeros(0)
        ses = np.zeros((0, 5))
        rmse = np.full(5, np.nan)
        cp = np.full(5, np.nan)
        mean_r = float("nan")
    valid = len(failures) <= 0.10 * config.m_reps
    return LadderRow(t_len=t_len, n_nodes=n_nodes, rmse=rmse, cp=cp,
                     mean_r_hat=mean_r, n_ok=len(ok), n_failed=len(failures),
                     valid=valid, estimates=est, r_hats=r_hats, ses=ses,
                     failures=failures)


def _make_network(config: ExperimentConfig, ladder_idx: int, n_nodes: int) -> Network:
    kwargs = {k: v for k, v in config.network.items() if k != "kind"}
    kwargs.pop("n", None)
    seed = kwargs.pop("seed", None)
    if seed is None:
        seed = derive_seed(config.base_seed, _NET_STREAM, ladder_idx)
    return generate(config.network["kind"], n_nodes, seed=seed, **kwargs)


def run_experiment(config: ExperimentConfig, n_workers: int | None = None) -> ExperimentReport:
    """Run the full ladder.  ``n_workers`` > 1 distributes replications over
    a process pool; results do not depend on the worker count."""
    if n_workers is None:
        n_workers = int(os.environ.get("PTNGARCH_THREADS", "1"))
    rows = []
    for ladder_idx, (t_len, n_nodes) in enumerate(config.nt_ladder):
        net = _make_network(config, ladder_idx, n_nodes)
        if n_workers > 1:
            with ProcessPoolExecutor(max_workers=n_workers) as pool:
                futures = [pool.submit(_replicate, config, net, ladder_idx, m)
                           for m in range(config.m_reps)]
                outcomes = [f.result() for f in futures]
        else:
            outcomes = [_replicate(config, net, ladder_idx, m)
                        for m in range(config.m_reps)]
        rows.append(_summarize(config, ladder_idx, outcomes))
    return ExperimentReport(rows=rows, config=config)


@dataclass
class QQData:
    """Plot-ready normal Q-Q pairs per coefficient."""
    coefficients: dict      # name -> (theoretical, empirical) arrays
    skipped: dict           # name -> reason
    diagnostics: dict


def qq_data(estimates, theta0=None, se_estimates=None) -> QQData:
    """Standardize per-replication estimates and pair them with standard
    normal quantiles.

    Each coefficient column is centred and scaled by its own sample mean and
    (population) standard deviation, sorted, and matched with
    norm_ppf((j - 0.5) / M).  ``theta0`` and ``se_estimates``, when given,
    only feed the diagnostics (mean bias, mean reported SE); a coefficient
    with zero sample spread is skipped with a reason.
    """
    est = np.atleast_2d(np.asarray(estimates, dtype=float))
    m = est.shape[0]
    if m < 2:
        raise ValueError(f"need at least 2 replications, got {m}")
    n_coef = est.shape[1]
    names = list(COEF_NAMES[:n_coef]) if n_coef <= 5 else [
        f"coef{k}" for k in range(n_coef)]
    theoretical = np.array([norm_ppf((j - 0.5) / m) for j in range(1, m + 1)])
    coefficients = {}
    skipped = {}
    for k, name in enumerate(names):
        col = est[:, k]
        sd = float(col.std())
        if sd == 0.0:
            skipped[name] = "zero sample standard deviation"
            continue
        empirical = np.sort((col - col.mean()) / sd)
        coefficients[name] = (theoretical.copy(), empirical)
    diagnostics = {}
    if theta0 is not None:
        diagnostics["mean_bias"] = est.mean(axis=0) - np.asarray(theta0, dtype=float)
    if se_estimates is not None:
        diagnostics["mean_reported_se"] = np.asarray(se_estimates, dtype=float).mean(axis=0)
    return QQData(coefficients=coefficients, skipped=skipped, diagnostics=diagnostics)
