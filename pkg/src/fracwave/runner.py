"""Dispatch a RunConfig to the experiment it names and record a manifest.

Each experiment writes its reports into ``output_dir`` and returns named
verdicts. Report bodies carry no timestamps, so equal configs give
byte-identical CSV files; timing lives only in manifest.json.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, serialize
from .duhamel import discrepancy_series, write_discrepancy_report
from .errors import FracwaveError
from .evolve import SolverConfig, solve, step_plan, write_trajectory_csv
from .fieldio import atomic_write, read_field, write_field
from .mollify import MollifierSpec, default_ladder
from .spectral import Field
from .vws_lab import (
    VWSTemplate,
    bound_ratio,
    coherence_run,
    energy_bound_check,
    kato_ponce_probe,
    load_c_star,
    moderateness_sweep,
    negligibility_twin,
    random_bound_problem,
    scale_data,
    sobolev_ratio_probe,
)

MANIFEST = "manifest.json"


class RunError(FracwaveError):
    """A module error raised while running an experiment."""


@dataclass
class RunManifest:
    config_sha256: str
    artifact_version: str
    experiment: str
    seed: int
    threads: int
    started: str
    finished: str
    outputs: list
    verdicts: dict
    summary: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v == "PASS" for v in self.verdicts.values())

    def write(self, path) -> Path:
        atomic_write(path, (json.dumps(asdict(self), indent=2, sort_keys=True) + "\n").encode())
        return Path(path)


def _verdict(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


def build_template(cfg: RunConfig) -> VWSTemplate:
    """Constants and field files become smooth inputs, catalog entries singular ones."""
    grid = cfg.grid.grid()
    p = cfg.problem
    smooth, singular = {}, {}
    for slot, coef in p.slots().items():
        if coef.constant is not None:
            smooth[slot] = Field.constant(grid, coef.constant)
        elif coef.file is not None:
            smooth[slot] = read_field(coef.file, grid)
        else:
            singular[slot] = coef.singular.datum()
    profile = p.f.profile if p.f is not None else None
    return VWSTemplate(grid, p.s, p.T, smooth, singular, profile)


def solver_config(cfg: RunConfig) -> SolverConfig:
    s = cfg.solver
    return SolverConfig(s.cfl_fraction, s.dt_override, s.snapshot_stride)


def single_problem(cfg: RunConfig):
    tpl = build_template(cfg)
    spec = MollifierSpec(cfg.mollifier.epsilon, cfg.mollifier.kernel) if tpl.singular else None
    return tpl.build(spec)


def _ladder(cfg: RunConfig, tpl: VWSTemplate) -> list:
    return list(cfg.params.ladder) if cfg.params.ladder is not None else default_ladder(tpl.grid)


# experiments: each returns (output paths, verdicts, summary) -----------------


def _solve(cfg: RunConfig, out: Path, threads: int):
    prm = cfg.params
    p = single_problem(cfg)
    traj, report = solve(p, solver_config(cfg))
    path = out / "trajectory.csv"
    write_trajectory_csv(path, traj, report, p.s)
    files = [path, *write_field(out / "final_u.csv", traj[-1].u), *write_field(out / "final_ut.csv", traj[-1].ut)]
    verdicts, summary = {}, {"final_time": traj[-1].t, "snapshots": len(traj)}
    if report.monotone_violation is not None:
        e0 = report.energy[0]
        summary["max_relative_drift"] = report.max_relative_drift()
        summary["monotone_violation"] = report.monotone_violation
        if np.all(p.b.samples == 0):
            verdicts["energy_conservation"] = _verdict(report.max_relative_drift() <= prm.energy_tolerance)
        else:
            verdicts["energy_monotone"] = _verdict(report.monotone_violation <= prm.monotone_slack * e0)
    return files, verdicts, summary


def _sweep(cfg: RunConfig, out: Path, threads: int):
    prm = cfg.params
    tpl = build_template(cfg)
    rep = moderateness_sweep(tpl, _ladder(cfg, tpl), prm.norm_selector, prm.kernel, solver_config(cfg),
                             threads, raise_inconclusive=False)
    verdicts = {"power_law_fit": _verdict(rep.verdict == "moderate")}
    if prm.expected_slope is not None:
        verdicts["slope_band"] = _verdict(abs(rep.fitted_slope - prm.expected_slope) <= prm.slope_tolerance)
    summary = {"fitted_slope": rep.fitted_slope, "r_squared": rep.r_squared, "N_hat": rep.N_hat}
    return list(rep.write(out / "sweep")), verdicts, summary


def _twin(cfg: RunConfig, out: Path, threads: int):
    prm = cfg.params
    tpl = build_template(cfg)
    rep = negligibility_twin(tpl, _ladder(cfg, tpl), prm.kernel_a, prm.kernel_b, prm.margin,
                             prm.norm_selector, solver_config(cfg), threads)
    summary = {"slope_gap": rep.slope_gap, "max_difference": max(rep.difference_norms)}
    return list(rep.write(out / "twin")), {"unique": _verdict(rep.unique)}, summary


def _coherence(cfg: RunConfig, out: Path, threads: int):
    prm = cfg.params
    tpl = build_template(cfg)
    rep = coherence_run(tpl, _ladder(cfg, tpl), prm.reference_kind, prm.kernel, prm.tolerance,
                        solver_config(cfg), threads)
    verdicts = {"monotone": _verdict(rep.monotone),
                "final_below_tolerance": _verdict(rep.final_error < prm.tolerance)}
    return list(rep.write(out / "coherence")), verdicts, {"final_error": rep.final_error}


def _duhamel(cfg: RunConfig, out: Path, threads: int):
    prm = cfg.params
    p = single_problem(cfg)
    scfg = solver_config(cfg)
    n_tau = prm.n_tau if prm.n_tau is not None else step_plan(p, scfg)[1]
    times, values = discrepancy_series(p, scfg, n_tau, threads)
    files = write_discrepancy_report(out / "duhamel", times, values, n_tau)
    top = max(values)
    return list(files), {"discrepancy_below_tolerance": _verdict(top <= prm.tolerance)}, {"max_discrepancy": top}


def _probes(cfg: RunConfig, out: Path, threads: int):
    prm = cfg.params
    kinds = ("sobolev", "kato_ponce") if prm.kind == "both" else (prm.kind,)
    probe = {"sobolev": sobolev_ratio_probe, "kato_ponce": kato_ponce_probe}
    files, verdicts, summary = [], {}, {}
    for kind in kinds:
        maxima = []
        for n in prm.n_values:
            rep = probe[kind](prm.dim, prm.s, prm.n_samples, n, prm.band, cfg.seed)
            files += rep.write(out / f"probe_{kind}_n{n}")
            maxima.append(rep.max_ratio)
        spread = max(abs(m - maxima[0]) for m in maxima) / maxima[0]
        summary[kind] = {"max_ratios": maxima, "relative_spread": spread}
        verdicts[f"{kind}_resolution_stable"] = _verdict(spread < prm.relative_tolerance)
    return files, verdicts, summary


def _bounds(cfg: RunConfig, out: Path, threads: int):
    prm = cfg.params
    scfg = solver_config(cfg)
    files, verdicts, summary = [], {}, {}
    for est in prm.estimates():
        c_star = prm.c_star if prm.c_star is not None else load_c_star(est)
        rep = energy_bound_check(est, prm.n_samples, cfg.seed, c_star=c_star, cfg=scfg, workers=threads)
        files += rep.write(out / f"bounds_{est}")
        base = random_bound_problem(np.random.default_rng(cfg.seed), est)
        r0 = bound_ratio(base, est, scfg)
        drift = max(abs(bound_ratio(scale_data(base, a), est, scfg) - r0) for a in prm.scale_factors)
        rel = drift / r0 if r0 > 0 else drift
        summary[est] = {"max_ratio": rep.max_ratio, "median_ratio": rep.median_ratio, "c_star": c_star,
                        "scale_drift": rel}
        verdicts[f"{est}_below_c_star"] = _verdict(rep.passed)
        verdicts[f"{est}_scale_invariant"] = _verdict(rel <= prm.scale_tolerance)
    return files, verdicts, summary


EXPERIMENTS = {
    "solve": _solve, "sweep": _sweep, "twin": _twin, "coherence": _coherence,
    "duhamel-check": _duhamel, "probes": _probes, "bounds": _bounds,
}


def _finite(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def run(cfg: RunConfig, threads: int = 1, config_bytes: bytes = None) -> RunManifest:
    """Run the configured experiment into ``cfg.output_dir`` and write its manifest.

    ``config_bytes`` are the ingested bytes the hash refers to; without them
    the canonical serialization is hashed.
    """
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = _now()
    try:
        files, verdicts, summary = EXPERIMENTS[cfg.experiment](cfg, out, max(1, threads))
    except (FracwaveError, ValueError, OSError) as exc:
        raise RunError(f"experiment {cfg.experiment!r}: {type(exc).__name__}: {exc}") from exc
    digest = hashlib.sha256(config_bytes if config_bytes is not None else serialize(cfg)).hexdigest()
    outputs = sorted(str(Path(f).relative_to(out)) for f in files)
    manifest = RunManifest(digest, __version__, cfg.experiment, cfg.seed, threads, started, _now(),
                           outputs + [MANIFEST], verdicts, _finite(summary))
    manifest.write(out / MANIFEST)
    return manifest
