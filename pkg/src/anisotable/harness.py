"""Experiment harness: config parsing, deterministic batch runs, CSV + manifest.

Every experiment writes its tables plus a manifest.json recording the
canonical config, its hash, the per-batch seeds, wall time, totals, and the
sha256 of every output file. `replay` re-runs the config into a scratch
directory and verifies byte-identical regeneration.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from ._rng import batch_key, derive_key
from .errors import ConfigError, MismatchDetected
from . import estimators as est
from . import geometry
from .geometry import domain_from_dict, domain_to_dict
from .model import (
    StableModel,
    halfspace_exponents,
    model_from_dict,
    model_to_dict,
    projection_coefficients,
)
from .runner import batch_layout, default_workers, simulate, simulate_increments
from .sampling import SchemeParams, sample_increment_1d_exact, scheme_bias_probe
from .sampling import scheme_from_dict, scheme_to_dict
from .sampling.paths import EXIT_KINDS
from ._rng import Stream

EXPERIMENTS = (
    "sample",
    "survival",
    "exponent-time",
    "exponent-space",
    "factorization",
    "overshoot",
    "yaglom",
    "zolotarev",
    "bias-probe",
)

_TOP_FIELDS = {
    "experiment", "model", "domain", "scheme", "params",
    "master_seed", "workers", "out_dir",
}


def fmt(x) -> str:
    """Shortest round-trip decimal for a float; stable across runs."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    model: StableModel
    domain: object
    scheme: Optional[SchemeParams]
    params: dict
    master_seed: int
    workers: int
    raw: dict

    @staticmethod
    def from_dict(spec: dict) -> "ExperimentConfig":
        extra = set(spec) - _TOP_FIELDS
        if extra:
            raise ConfigError(f"unknown config fields: {sorted(extra)}")
        kind = spec.get("experiment")
        if kind not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {kind!r}")
        if "master_seed" not in spec:
            raise ConfigError("master_seed must be explicit (no wall-clock default)")
        model = model_from_dict(spec["model"])
        domain = domain_from_dict(spec["domain"]) if "domain" in spec else None
        scheme = scheme_from_dict(spec["scheme"]) if "scheme" in spec else None
        params = dict(spec.get("params", {}))
        n = params.get("n")
        if n is not None and int(n) < 1:
            raise ConfigError("n must be >= 1")
        return ExperimentConfig(
            experiment=kind,
            model=model,
            domain=domain,
            scheme=scheme,
            params=params,
            master_seed=int(spec["master_seed"]),
            workers=int(spec.get("workers", 0)) or default_workers(),
            raw=spec,
        )

    def canonical(self) -> str:
        body = {
            "experiment": self.experiment,
            "model": model_to_dict(self.model),
            "params": self.params,
            "master_seed": self.master_seed,
        }
        if self.domain is not None:
            body["domain"] = domain_to_dict(self.domain)
        if self.scheme is not None:
            body["scheme"] = scheme_to_dict(self.scheme)
        return json.dumps(body, sort_keys=True, separators=(",", ":"))


def config_hash(config: ExperimentConfig) -> str:
    return hashlib.sha256(config.canonical().encode()).hexdigest()


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) if not isinstance(v, str) else v for v in row))
    path.write_text("\n".join(lines) + "\n")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# experiment bodies; each returns {filename: (header, rows)}


def _points_list(params, key, dim):
    pts = np.atleast_2d(np.asarray(params[key], dtype=np.float64))
    if pts.shape[1] != dim:
        raise ConfigError(f"{key} entries must have dimension {dim}")
    return pts


def _run_sample(cfg: ExperimentConfig):
    p = _check_params(cfg.params, {"n", "t"})
    n, t = int(p["n"]), float(p["t"])
    x = simulate_increments(cfg.model, t, n, cfg.master_seed, 1, cfg.scheme, cfg.workers)
    header = ["sample_id"] + [f"x_{i+1}" for i in range(cfg.model.dim)]
    rows = ([i] + list(x[i]) for i in range(n))
    return {"samples.csv": (header, rows)}, {"n": n, "t": t}


def exit_record_rows(batch, batch_size: int):
    """Rows in the ExitRecord CSV schema:
    batch, path_id, survived, exit_time, pre_exit_1..d, post_exit_1..d, exit_kind.
    """
    for i in range(batch.n):
        yield (
            [i // batch_size, i % batch_size, int(batch.survived[i]),
             float(batch.exit_time[i])]
            + [float(v) for v in batch.pre_exit[i]]
            + [float(v) for v in batch.post_exit[i]]
            + [EXIT_KINDS[int(batch.exit_kind[i])]]
        )


def exit_record_header(dim: int) -> list[str]:
    return (
        ["batch", "path_id", "survived", "exit_time"]
        + [f"pre_exit_{i+1}" for i in range(dim)]
        + [f"post_exit_{i+1}" for i in range(dim)]
        + ["exit_kind"]
    )


def _run_survival(cfg: ExperimentConfig):
    p = _check_params(
        cfg.params, {"points", "t_grid", "n", "dump_records"},
        optional={"dump_records"},
    )
    pts = _points_list(p, "points", cfg.model.dim)
    t_grid = sorted(float(t) for t in p["t_grid"])
    n = int(p["n"])
    dump = bool(p.get("dump_records", False))
    header = [f"x_{i+1}" for i in range(cfg.model.dim)] + ["t", "p_hat", "se", "n"]
    rows = []
    out = {}
    for i, x in enumerate(pts):
        if isinstance(cfg.domain, geometry.FullSpace):
            for t in t_grid:
                rows.append(list(x) + [t, 1.0, 0.0, n])
            continue
        batch = simulate(
            cfg.model, cfg.domain, x, t_grid[-1], cfg.scheme, n,
            cfg.master_seed, 100 + i, workers=cfg.workers,
        )
        for t in t_grid:
            ph = float(batch.alive_at(t).mean())
            rows.append(list(x) + [t, ph, float(np.sqrt(ph * (1 - ph) / n)), n])
        if dump:
            from .runner import BATCH_SIZE

            out[f"records_x{i}.csv"] = (
                exit_record_header(cfg.model.dim),
                list(exit_record_rows(batch, BATCH_SIZE)),
            )
    out["survival.csv"] = (header, rows)
    return out, {"n": n, "points": len(pts)}


def _exponent_rows(tag: str, fit: est.ExponentFit):
    return [
        [tag, fit.estimate, fit.ci_lo, fit.ci_hi, fit.n_points],
    ]


def _survival_rows_from_fit(x, fit: est.ExponentFit, n):
    # full curve, including points the regression dropped for thin survivors
    grid = fit.all_grid if fit.all_grid is not None else fit.grid
    p = fit.all_p_hat if fit.all_p_hat is not None else fit.p_hat
    rows = []
    for g, ph in zip(grid, p):
        rows.append(list(x) + [g, ph, float(np.sqrt(ph * (1 - ph) / n)), n])
    return rows


def _run_exponent_time(cfg: ExperimentConfig):
    p = _check_params(cfg.params, {"x", "t_grid", "n"})
    x = np.asarray(p["x"], dtype=np.float64)
    fit = est.survival_exponent_time(
        cfg.model, cfg.domain, x, [float(t) for t in p["t_grid"]], int(p["n"]),
        cfg.scheme, cfg.master_seed, 2, cfg.workers,
    )
    header = ["target", "estimate", "ci_lo", "ci_hi", "n_points"]
    sheader = [f"x_{i+1}" for i in range(cfg.model.dim)] + ["t", "p_hat", "se", "n"]
    return {
        "exponent.csv": (header, _exponent_rows("beta_over_alpha", fit)),
        "survival.csv": (sheader, _survival_rows_from_fit(x, fit, int(p["n"]))),
    }, {"estimate": fit.estimate}


def _run_exponent_space(cfg: ExperimentConfig):
    p = _check_params(cfg.params, {"direction", "s_grid", "t", "n"})
    fit = est.survival_exponent_space(
        cfg.model, cfg.domain, np.asarray(p["direction"], dtype=np.float64),
        [float(s) for s in p["s_grid"]], float(p["t"]), int(p["n"]),
        cfg.scheme, cfg.master_seed, 3, cfg.workers,
    )
    header = ["target", "estimate", "ci_lo", "ci_hi", "n_points"]
    return {"exponent.csv": (header, _exponent_rows("beta", fit))}, {
        "estimate": fit.estimate
    }


def _run_factorization(cfg: ExperimentConfig):
    p = _check_params(cfg.params, {"x_list", "y_list", "t_grid", "n", "bandwidth"}, optional={"bandwidth"})
    rep = est.factorization_ratio(
        cfg.model, cfg.domain,
        _points_list(p, "x_list", cfg.model.dim),
        _points_list(p, "y_list", cfg.model.dim),
        [float(t) for t in p["t_grid"]], int(p["n"]),
        p.get("bandwidth"), cfg.scheme, cfg.master_seed, 5, cfg.workers,
    )
    header = ["t", "x_id", "y_id", "ratio"]
    rows = []
    for k, t in enumerate(rep.t_grid):
        for i in range(rep.x_list.shape[0]):
            for j in range(rep.y_list.shape[0]):
                rows.append([t, i, j, rep.ratios[k, i, j]])
    sheader = ["t", "spread"]
    srows = [[t, rep.spreads[k]] for k, t in enumerate(rep.t_grid)]
    return {
        "ratio.csv": (header, rows),
        "ratio_spread.csv": (sheader, srows),
    }, {"spreads": rep.spreads.tolist()}


def _run_overshoot(cfg: ExperimentConfig):
    p = _check_params(cfg.params, {"x", "t_max", "n", "pre_bins", "n_post_bins"},
                      optional={"n_post_bins"})
    rep = est.overshoot_conditional_check(
        cfg.model, cfg.domain, np.asarray(p["x"], dtype=np.float64),
        float(p["t_max"]), int(p["n"]), p["pre_bins"],
        int(p.get("n_post_bins", 40)), cfg.scheme, cfg.master_seed, 6, cfg.workers,
    )
    header = ["u_lo", "u_hi", "tv", "n_exits"]
    rows = [
        [rep.pre_bins[k], rep.pre_bins[k + 1], rep.tv_per_bin[k], rep.counts_per_bin[k]]
        for k in range(rep.tv_per_bin.size)
    ]
    return {"overshoot.csv": (header, rows)}, {
        "aggregate_tv": rep.aggregate_tv,
        "n_jump_exits": rep.n_jump_exits,
    }


def _run_yaglom(cfg: ExperimentConfig):
    p = _check_params(cfg.params, {"starts", "t_grid", "n", "bins"})
    bins = dict(p["bins"])
    _reject_unknown(bins, {"lo", "hi", "nbins"}, "bins")
    spec = est.BinSpec(bins["lo"], bins["hi"], bins["nbins"])
    rep = est.yaglom_convergence(
        cfg.model, cfg.domain, _points_list(p, "starts", cfg.model.dim),
        [float(t) for t in p["t_grid"]], int(p["n"]), spec,
        cfg.scheme, cfg.master_seed, 8, cfg.workers,
    )
    d = cfg.model.dim
    header = (
        [f"bin_lo_{i+1}" for i in range(d)]
        + [f"bin_hi_{i+1}" for i in range(d)]
        + ["mass"]
    )
    out = {}
    edges = spec.edges()
    for (i, k), hist in sorted(rep.histograms.items()):
        rows = []
        it = np.ndindex(*[int(nb) for nb in spec.nbins])
        flat = hist.masses.reshape([int(nb) for nb in spec.nbins])
        for idx in it:
            lo = [edges[a][idx[a]] for a in range(d)]
            hi = [edges[a][idx[a] + 1] for a in range(d)]
            rows.append(lo + hi + [flat[idx]])
        rows.append([np.inf] * d + [np.inf] * d + [hist.overflow])
        out[f"hist_s{i}_t{k}.csv"] = (header, rows)
    tvh = ["start_id", "t_lo", "t_hi", "tv"]
    tvr = []
    for i in range(rep.starts.shape[0]):
        for k in range(rep.t_grid.size - 1):
            tvr.append([i, rep.t_grid[k], rep.t_grid[k + 1], rep.tv_over_t[i, k]])
    sh = ["start_id", "tv_vs_start0"]
    srows = [[i, rep.tv_over_starts[i]] for i in range(rep.starts.shape[0])]
    out["yaglom_tv_t.csv"] = (tvh, tvr)
    out["yaglom_tv_starts.csv"] = (sh, srows)
    return out, {
        "tv_over_t": rep.tv_over_t.tolist(),
        "tv_over_starts": rep.tv_over_starts.tolist(),
    }


def _run_zolotarev(cfg: ExperimentConfig):
    p = _check_params(cfg.params, {"normal", "mc_check_n"}, optional={"mc_check_n"})
    normal = np.asarray(p["normal"], dtype=np.float64)
    coeffs = projection_coefficients(cfg.model, normal)
    he = halfspace_exponents(cfg.model, normal)
    rows = [
        ["c_minus", coeffs.c_minus, coeffs.c_minus, coeffs.c_minus, 0],
        ["c_plus", coeffs.c_plus, coeffs.c_plus, coeffs.c_plus, 0],
        ["rho", he.rho, he.rho, he.rho, 0],
        ["beta", he.beta, he.beta, he.beta, 0],
        ["beta_hat", he.beta_hat, he.beta_hat, he.beta_hat, 0],
    ]
    info = {"rho": he.rho, "beta": he.beta, "beta_hat": he.beta_hat}
    n_mc = int(p.get("mc_check_n", 0))
    if n_mc:
        stream = Stream(derive_key(cfg.master_seed, 0x7A6F6C6F))
        y = sample_increment_1d_exact(
            cfg.model.alpha, coeffs.c_minus, coeffs.c_plus, 1.0, n_mc, stream
        )
        rho_mc = float((y > 0).mean())
        se = float(np.sqrt(rho_mc * (1 - rho_mc) / n_mc))
        rows.append(["rho_mc", rho_mc, rho_mc - 1.96 * se, rho_mc + 1.96 * se, n_mc])
        info["rho_mc"] = rho_mc
    header = ["target", "estimate", "ci_lo", "ci_hi", "n_points"]
    return {"exponent.csv": (header, rows)}, info


def _run_bias_probe(cfg: ExperimentConfig):
    p = _check_params(cfg.params, {"eps_list", "t", "n"})
    header = ["eps", "ks_scaling", "p_scaling", "ks_oracle", "p_oracle"]
    rows = []
    kss = []
    for e in p["eps_list"]:
        scheme = SchemeParams(
            eps=float(e),
            delta=cfg.scheme.delta if cfg.scheme else None,
            small_jump_mode=cfg.scheme.small_jump_mode if cfg.scheme else None,
        )
        rep = scheme_bias_probe(
            cfg.model, scheme, int(p["n"]), cfg.master_seed, float(p["t"])
        )
        rows.append([rep.eps, rep.ks_scaling, rep.p_scaling, rep.ks_oracle, rep.p_oracle])
        kss.append(rep.ks_scaling)
    return {"bias_probe.csv": (header, rows)}, {"ks_scaling": kss}


def _check_params(params: dict, allowed: set, optional: set = frozenset()):
    _reject_unknown(params, allowed, "params")
    missing = allowed - optional - set(params)
    if missing:
        raise ConfigError(f"params missing fields: {sorted(missing)}")
    return params


def _reject_unknown(d: dict, allowed: set, where: str):
    extra = set(d) - allowed
    if extra:
        raise ConfigError(f"unknown {where} fields: {sorted(extra)}")


_BODIES = {
    "sample": _run_sample,
    "survival": _run_survival,
    "exponent-time": _run_exponent_time,
    "exponent-space": _run_exponent_space,
    "factorization": _run_factorization,
    "overshoot": _run_overshoot,
    "yaglom": _run_yaglom,
    "zolotarev": _run_zolotarev,
    "bias-probe": _run_bias_probe,
}


def run(config: ExperimentConfig, out_dir) -> dict:
    """Execute the experiment; write CSVs and the manifest; return the manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.time()
    tables, totals = _BODIES[config.experiment](config)
    files = {}
    for name, (header, rows) in tables.items():
        path = out / name
        _write_csv(path, header, rows)
        files[name] = _sha256(path)
    n = int(config.params.get("n", 0))
    seeds = []
    if n:
        eff = derive_key(config.master_seed, 0)
        seeds = [batch_key(eff, i) for i in range(len(batch_layout(n)))]
    manifest = {
        "tool": "anisotable",
        "version": __version__,
        "experiment": config.experiment,
        "config": json.loads(config.canonical()),
        "config_hash": config_hash(config),
        "master_seed": config.master_seed,
        "batch_size": 1 << 14,
        "batch_seeds_run_tag0": seeds,
        "workers": config.workers,
        "wall_time_s": round(time.time() - t0, 3),
        "totals": totals,
        "outputs": files,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def replay(manifest_path, scratch_dir=None) -> list[str]:
    """Re-run the manifest's config and verify byte-identical outputs.

    Returns warnings (e.g. tool-version drift). Raises MismatchDetected if
    any recorded file differs, is missing, or has been tampered with.
    """
    manifest_path = Path(manifest_path)
    manifest = json.loads(manifest_path.read_text())
    warnings = []
    if manifest.get("version") != __version__:
        warnings.append(
            f"tool version drift: manifest {manifest.get('version')} vs current {__version__}"
        )
    base = manifest_path.parent
    for name, digest in manifest["outputs"].items():
        p = base / name
        if not p.exists():
            raise MismatchDetected(f"recorded output missing: {name}")
        if _sha256(p) != digest:
            raise MismatchDetected(f"recorded output tampered: {name}")
    body = dict(manifest["config"])
    body["workers"] = manifest.get("workers", 1)
    cfg = ExperimentConfig.from_dict(body)
    scratch = Path(scratch_dir) if scratch_dir else base / "_replay"
    fresh = run(cfg, scratch)
    for name, digest in manifest["outputs"].items():
        if fresh["outputs"].get(name) != digest:
            raise MismatchDetected(f"replay regenerated different bytes: {name}")
    return warnings
