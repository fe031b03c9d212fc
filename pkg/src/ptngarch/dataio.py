"""Panel / result file formats and JSON (de)serialization.

Panels are CSV with one row per time point and one column per node; an
optional header row carries node ids (any token that is not a bare integer
marks the first row as a header).  All structured results are JSON with
sorted keys and round-trip float formatting, so identical inputs give
byte-identical files.  Writes go through a temp file and an atomic rename:
a failed run never leaves a partial output behind.
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .dgp import COEF_NAMES, ThresholdParams
from .estimate import FitOptions, FitResult, ProfilePoint
from .likelihood import Panel
from .montecarlo import ExperimentConfig, ExperimentReport, QQData


def _is_int_token(tok: str) -> bool:
    tok = tok.strip()
    if not tok:
        return False
    if tok[0] in "+-":
        tok = tok[1:]
    return tok.isdigit()


def load_panel(path) -> Panel:
    """Read a counts panel; rows = time, columns = nodes.

    Rejects ragged rows, non-integer tokens and negative values, naming the
    offending row/column (1-based, header excluded from the count).
    """
    with open(path) as fh:
        raw_lines = [line.rstrip("\n") for line in fh]
    lines = [(i + 1, line) for i, line in enumerate(raw_lines) if line.strip()]
    if not lines:
        raise ValueError(f"{path}: empty panel file")
    first_tokens = lines[0][1].split(",")
    node_ids = None
    if not all(_is_int_token(t) for t in first_tokens):
        node_ids = tuple(t.strip() for t in first_tokens)
        lines = lines[1:]
        if not lines:
            raise ValueError(f"{path}: header but no data rows")
    n_cols = len(lines[0][1].split(","))
    if node_ids is not None and len(node_ids) != n_cols:
        raise ValueError(
            f"{path}: header has {len(node_ids)} ids but rows have {n_cols} columns")
    data = np.empty((len(lines), n_cols), dtype=np.int64)
    for row_idx, (lineno, line) in enumerate(lines):
        tokens = line.split(",")
        if len(tokens) != n_cols:
            raise ValueError(
                f"{path}: line {lineno} has {len(tokens)} values, expected {n_cols}")
        for col_idx, tok in enumerate(tokens):
            if not _is_int_token(tok):
                raise ValueError(
                    f"{path}: line {lineno}, column {col_idx + 1}: "
                    f"non-integer value {tok.strip()!r}")
            val = int(tok)
            if val < 0:
                raise ValueError(
                    f"{path}: line {lineno}, column {col_idx + 1}: "
                    f"negative count {val}")
            data[row_idx, col_idx] = val
    return Panel(counts=data.T.copy(), node_ids=node_ids)


def save_panel(panel: Panel, path) -> None:
    lines = []
    if panel.node_ids is not None:
        lines.append(",".join(panel.node_ids))
    for t in range(panel.t_len):
        lines.append(",".join(str(int(v)) for v in panel.counts[:, t]))
    _atomic_write(path, "\n".join(lines) + "\n")


def _atomic_write(path, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(obj, path) -> None:
    _atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def params_to_dict(params: ThresholdParams) -> dict:
    return {"omega": params.omega, "alpha1": params.alpha1,
            "alpha2": params.alpha2, "xi": params.xi, "beta": params.beta,
            "r": params.r}


def params_from_dict(d: dict) -> ThresholdParams:
    missing = [k for k in ("omega", "alpha1", "alpha2", "xi", "beta", "r")
               if k not in d]
    if missing:
        raise ValueError(f"parameter file is missing keys: {missing}")
    return ThresholdParams(omega=float(d["omega"]), alpha1=float(d["alpha1"]),
                           alpha2=float(d["alpha2"]), xi=float(d["xi"]),
                           beta=float(d["beta"]), r=int(d["r"]))


def fit_result_to_dict(result: FitResult, node_ids=None) -> dict:
    return {
        "coef_names": list(COEF_NAMES),
        "theta_hat": result.theta_hat.tolist(),
        "r_hat": result.r_hat,
        "loglik": result.loglik,
        "loglik_sum": result.loglik_sum,
        "profile": [{"r": p.r, "theta": p.theta.tolist(), "loglik": p.loglik,
                     "converged": p.converged, "n_iter": p.n_iter}
                    for p in result.profile],
        "sigma_hat": result.sigma_hat.tolist(),
        "se": None if result.se is None else result.se.tolist(),
        "ci95": None if result.ci95 is None else result.ci95.tolist(),
        "boundary_flags": [bool(b) for b in result.boundary_flags],
        "effective_nt": result.effective_nt,
        "diagnostics": result.diagnostics,
        "node_ids": list(node_ids) if node_ids else None,
    }


def fit_result_from_dict(d: dict) -> FitResult:
    profile = [ProfilePoint(r=p["r"], theta=np.array(p["theta"]),
                            loglik=p["loglik"], converged=p["converged"],
                            any_start_converged=p["converged"],
                            n_iter=p.get("n_iter", 0), n_eval=0,
                            start_index=0, message="", proj_grad_norm=float("nan"))
               for p in d.get("profile", [])]
    return FitResult(
        theta_hat=np.array(d["theta_hat"], dtype=float),
        r_hat=int(d["r_hat"]),
        loglik=float(d["loglik"]),
        loglik_sum=float(d.get("loglik_sum", float("nan"))),
        profile=profile,
        sigma_hat=np.array(d["sigma_hat"], dtype=float),
        se=None if d.get("se") is None else np.array(d["se"], dtype=float),
        ci95=None if d.get("ci95") is None else np.array(d["ci95"], dtype=float),
        boundary_flags=np.array(d["boundary_flags"], dtype=bool),
        effective_nt=int(d["effective_nt"]),
        diagnostics=d.get("diagnostics", {}),
    )


_FIT_OPT_KEYS = ("r_min", "r_max", "delta", "beta_max", "coef_max",
                 "tol_grad", "max_iter", "n_starts")


def fit_options_from_dict(d: dict) -> FitOptions:
    unknown = set(d) - set(_FIT_OPT_KEYS)
    if unknown:
        raise ValueError(f"unknown fit option(s): {sorted(unknown)}")
    return FitOptions(**d)


def experiment_config_from_dict(d: dict) -> ExperimentConfig:
    required = ("network", "nt_ladder", "true_params")
    missing = [k for k in required if k not in d]
    if missing:
        raise ValueError(f"experiment config is missing keys: {missing}")
    return ExperimentConfig(
        network=dict(d["network"]),
        nt_ladder=tuple((int(t), int(n)) for t, n in d["nt_ladder"]),
        true_params=params_from_dict(d["true_params"]),
        m_reps=int(d.get("m_reps", 200)),
        base_seed=int(d.get("base_seed", 0)),
        burn_in=int(d.get("burn_in", 500)),
        fit_opts=fit_options_from_dict(d.get("fit_opts", {})),
        ci_level=float(d.get("ci_level", 0.95)),
    )


def report_to_dict(report: ExperimentReport) -> dict:
    cfg = report.config
    return {
        "config": {
            "network": cfg.network,
            "nt_ladder": [list(p) for p in cfg.nt_ladder],
            "true_params": params_to_dict(cfg.true_params),
            "m_reps": cfg.m_reps,
            "base_seed": cfg.base_seed,
            "burn_in": cfg.burn_in,
            "ci_level": cfg.ci_level,
        },
        "rows": [{
            "t_len": row.t_len,
            "n_nodes": row.n_nodes,
            "coef_names": list(COEF_NAMES),
            "rmse": row.rmse.tolist(),
            "cp": row.cp.tolist(),
            "mean_r_hat": row.mean_r_hat,
            "n_ok": row.n_ok,
            "n_failed": row.n_failed,
            "valid": row.valid,
            "estimates": row.estimates.tolist(),
            "r_hats": row.r_hats.tolist(),
            "ses": row.ses.tolist(),
            "failures": [[m, reason] for m, reason in row.failures],
        } for row in report.rows],
    }


def qq_to_csv(qq: QQData, path) -> None:
    lines = ["coefficient,theoretical,empirical"]
    for name, (theo, emp) in qq.coefficients.items():
        for t_val, e_val in zip(theo, emp):
            lines.append(f"{name},{t_val!r},{e_val!r}")
    _atomic_write(path, "\n".join(lines) + "\n")
