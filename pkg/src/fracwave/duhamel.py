"""Duhamel superposition for the forced problem.

u(t) = w(t) + int_0^t v(t; tau) d tau, where w solves the unforced problem with
the original data and v(.; tau) solves the unforced problem from time tau with
data (0, f(tau)). The tau-integral is a trapezoid rule on nodes that coincide
with solver steps; a snapshot time between two nodes gets an extra partial
panel closed by v(t; t) = 0 (and v_t(t; t) = f(t) for the velocity).
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import MisalignedTauGrid
from .evolve import (
    ProblemSpec,
    SolverConfig,
    StateSnapshot,
    _Operator,
    _reference_scale,
    integrate,
    solve,
    step_plan,
)
from .spectral import Field, l2_array


@dataclass
class DuhamelDecomposition:
    w: list
    tau_grid: list
    v_initials: list
    reconstructed: list


def _snapshot_steps(n_steps: int, stride: int) -> list:
    steps = list(range(0, n_steps + 1, stride))
    if steps[-1] != n_steps:
        steps.append(n_steps)
    return steps


def _panel_weights(k: int, per_node: int, dt: float) -> dict:
    """Trapezoid weights {node index: weight} for int_0^{t_k} over nodes every
    ``per_node`` steps, the last (partial) panel closed at t_k itself."""
    d_tau = per_node * dt
    last = k // per_node
    rest = (k - last * per_node) * dt
    weights = {}
    for j in range(last + 1):
        wgt = d_tau if 0 < j < last else 0.5 * d_tau
        if last == 0:
            wgt = 0.0
        weights[j] = wgt
    weights[last] = weights[last] + 0.5 * rest
    return weights


def duhamel_solve(p: ProblemSpec, cfg: SolverConfig = SolverConfig(), n_tau: int = None,
                  workers: int = 1) -> DuhamelDecomposition:
    """Reconstruct the forced trajectory from unforced solves.

    ``n_tau`` is the number of tau panels (n_tau + 1 nodes); it must divide the
    solver's step count. Results do not depend on ``workers``.
    """
    dt, n_steps = step_plan(p, cfg)
    if n_tau is None:
        n_tau = n_steps
    if n_tau < 2:
        raise ValueError(f"n_tau must be >= 2, got {n_tau}")
    if n_steps % n_tau:
        raise MisalignedTauGrid(
            f"n_tau = {n_tau} does not divide the {n_steps} solver steps; tau nodes must sit on steps"
        )
    per_node = n_steps // n_tau
    grid = p.grid
    op = _Operator(p)
    ref = _reference_scale(p)
    snaps = _snapshot_steps(n_steps, cfg.snapshot_stride)
    snap_index = {k: i for i, k in enumerate(snaps)}

    w_states = [
        (u.copy(), ut.copy())
        for k, _, u, ut in integrate(p, dt, n_steps, p.u0.samples, p.u1.samples,
                                     forced=False, op=op, ref=ref)
        if k in snap_index
    ]
    times = [k * dt for k in snaps]
    times[-1] = p.T
    weights = [_panel_weights(k, per_node, dt) for k in snaps]

    tau_grid = [j * per_node * dt for j in range(n_tau + 1)]
    tau_grid[-1] = p.T
    zero = Field.zeros(grid)
    f_nodes = [p.forcing.at(tau, grid) for tau in tau_grid]

    acc_u = [np.zeros(grid.shape) for _ in snaps]
    acc_ut = [np.zeros(grid.shape) for _ in snaps]

    def aux(j: int) -> list:
        """(snapshot index, weight * v, weight * v_t) contributions of node j."""
        start = j * per_node
        out = []
        f = f_nodes[j].samples
        stream = integrate(p, dt, n_steps - start, np.zeros(grid.shape), f,
                           t0=tau_grid[j], forced=False, op=op,
                           ref=ref + l2_array(f, grid))
        for k, _, v, vt in stream:
            i = snap_index.get(start + k)
            if i is None:
                continue
            wgt = weights[i].get(j, 0.0)
            if wgt:
                out.append((i, wgt * v, wgt * vt))
        return out

    def absorb(contribs):
        for i, cu, cut in contribs:
            acc_u[i] += cu
            acc_ut[i] += cut

    nodes = range(n_tau + 1)
    if workers <= 1:
        for j in nodes:
            absorb(aux(j))
    else:
        # map preserves order, so the reduction order matches the serial path
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for contribs in pool.map(aux, nodes):
                absorb(contribs)

    reconstructed = []
    w_traj = []
    for i, k in enumerate(snaps):
        wu, wut = w_states[i]
        w_traj.append(StateSnapshot(times[i], Field(grid, wu), Field(grid, wut)))
        if k == 0:
            reconstructed.append(StateSnapshot(0.0, p.u0, p.u1))
            continue
        # velocity panel closed by v_t(t; t) = f(t)
        rest = (k - (k // per_node) * per_node) * dt
        vel = wut + acc_ut[i]
        if rest:
            vel = vel + 0.5 * rest * p.forcing.at(times[i], grid).samples
        reconstructed.append(StateSnapshot(times[i], Field(grid, wu + acc_u[i]), Field(grid, vel)))
    return DuhamelDecomposition(w_traj, tau_grid, [(zero, f) for f in f_nodes], reconstructed)


def discrepancy_series(p: ProblemSpec, cfg: SolverConfig = SolverConfig(), n_tau: int = None,
                       workers: int = 1) -> tuple:
    """(times, relative L2 differences) between Duhamel and direct solutions."""
    dec = duhamel_solve(p, cfg, n_tau, workers)
    direct, _ = solve(p, cfg)
    grid = p.grid
    out = []
    for a, b in zip(dec.reconstructed, direct):
        diff = l2_array(a.u.samples - b.u.samples, grid)
        scale = l2_array(b.u.samples, grid)
        out.append(diff / scale if scale > 0 else diff)
    return [s.t for s in direct], out


def duhamel_discrepancy(p: ProblemSpec, cfg: SolverConfig = SolverConfig(), n_tau: int = None,
                        workers: int = 1) -> float:
    """max_t ||u_duhamel(t) - u_direct(t)|| / ||u_direct(t)||."""
    return max(discrepancy_series(p, cfg, n_tau, workers)[1])


def write_discrepancy_report(prefix, times, values, n_tau: int) -> tuple:
    """Writes <prefix>.csv with (t, discrepancy) rows and <prefix>.json."""
    csv_path, json_path = f"{prefix}.csv", f"{prefix}.json"
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("t", "discrepancy"))
        for t, v in zip(times, values):
            w.writerow((format(t, ".17g"), format(v, ".17g")))
    with open(json_path, "w") as fh:
        json.dump({"n_tau": n_tau, "max_discrepancy": max(values)}, fh, indent=2)
    return csv_path, json_path
