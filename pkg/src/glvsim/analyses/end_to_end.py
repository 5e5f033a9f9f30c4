"""Campaigns that run the whole chain from the transmitter to the alarm."""

from __future__ import annotations

import numpy as np

from glvsim import MOLECULES
from glvsim.analyses.common import CampaignResult, parallel_map
from glvsim.config import Setup, grid_axis
from glvsim.receiver import LINEARITY_THRESHOLD, STATE_NAMES
from glvsim.pipeline import air_at, emission, grid_rows_summary, receivers_summary, run_point, wind
from glvsim.transmitter import carbon_budget_amplitudes


def _t(v):
    return None if v is None else float(v)


TRAJECTORY_HEADER = ["time_s", *STATE_NAMES, "r", *(f"A_{m}" for m in MOLECULES)]


def _trajectory_table(traj) -> tuple:
    table = np.vstack([traj.times, traj.states, traj.ratio, traj.absorption]).T
    return TRAJECTORY_HEADER, [tuple(map(float, r)) for r in table]


def run_point_to_point(setup: Setup, horizon_s: float | None = None) -> CampaignResult:
    horizon_s = horizon_s or setup.campaign("point_to_point")["horizon_s"]
    res = run_point(setup, setup.raw["geometry"]["rx"], horizon_s)
    traj = res.trajectory
    air_t = res.air.times
    air_rows = np.column_stack([air_t] + [res.air.values[m] for m in MOLECULES])
    frac = float(np.count_nonzero(traj.ratio > LINEARITY_THRESHOLD)) / traj.ratio.size
    return CampaignResult(
        "point_to_point",
        {"trajectory.csv": _trajectory_table(traj),
         "air.csv": (["time_s", *(f"c_{m}" for m in MOLECULES)], [tuple(map(float, r)) for r in air_rows])},
        {"alarm_time_s": res.alarm_time, "linearity_time_s": res.linearity_time,
         "final_c_v_um": float(traj["c_v"][-1]), "nonlinear_fraction": frac,
         "clamp_events": traj.clamp_events, "max_mass_residual": traj.max_mass_residual})


def sweep_distances(d_min: float, d_max: float, n: int) -> np.ndarray:
    return np.geomspace(d_min, d_max, n)


def run_distance_sweep(setup: Setup, regime: str | None = None, distances=None,
                       horizon_s: float | None = None, trajectories: bool = False) -> CampaignResult:
    """Alarm and linearity time against distance, all receivers on one shared wind path."""
    c = setup.campaign("distance_sweep")
    regime = regime or c["regime"]
    horizon_s = horizon_s or c["horizon_s"]
    if distances is None:
        distances = sweep_distances(c["d_min"], c["d_max"], c["n_points"])
    tx = np.asarray(setup.raw["geometry"]["tx"], dtype=float)
    z = setup.raw["geometry"]["rx"][2]
    positions = [(tx[0] + d, tx[1], z) for d in distances]
    signal = emission(setup, horizon_s)
    path = wind(setup, horizon_s, regime)
    traces = air_at(setup, signal, path, horizon_s, positions)
    batch = receivers_summary(setup, traces, store=trajectories)
    rows = [(regime, float(d), a, l) for d, a, l in zip(distances, batch.alarm_times, batch.linearity_times)]
    tables = {"distance_sweep.csv": (["regime", "distance_m", "alarm_time_s", "linearity_time_s"], rows)}
    if trajectories:
        k_m = setup.receiver_params().k_m
        for i in range(len(rows)):
            tables[f"trajectory_{i:02d}.csv"] = _trajectory_table(batch.trajectory(i, k_m))
    return CampaignResult("distance_sweep", tables,
                          {"regime": regime, "alarmed": sum(a is not None for _, _, a, _ in rows),
                           "clamp_events": int(batch.clamp_events.sum())})


def _map_block(job):
    raw, regime, horizon_s, xs, ys, z, first_index, eps, substeps = job
    setup = Setup(raw)
    signal = emission(setup, horizon_s)
    path = wind(setup, horizon_s, regime)
    b = grid_rows_summary(setup, signal, path, horizon_s, xs, ys, z, first_index, eps, substeps)
    return b.alarm_times, b.linearity_times


def run_alarm_map(setup: Setup, regimes=None, snapshots_h=None, horizon_s: float | None = None,
                  workers: int = 1) -> CampaignResult:
    """Alarm time of every grid receiver, thresholded at the snapshot times.

    Each regime uses one wind realisation shared by all receivers. The grid
    is split into fixed row blocks, so results do not depend on ``workers``.
    """
    c = setup.campaign("alarm_map")
    regimes = list(regimes or c["regimes"])
    snapshots_h = list(c["snapshots_h"] if snapshots_h is None else snapshots_h)
    horizon_s = horizon_s or c["horizon_s"]
    if any(t < 0 or t * 3600.0 > horizon_s for t in snapshots_h):
        raise ValueError("snapshot times must lie in [0, horizon]")
    xs, ys = grid_axis(c["x"]), grid_axis(c["y"])
    z = setup.raw["geometry"]["rx"][2]
    block = setup.raw["channel"]["row_block"]
    jobs = [(setup.raw, r, horizon_s, xs, ys[j:j + block], z, j * len(xs), c["tree_eps"],
             c["receiver_substeps"])
            for r in regimes for j in range(0, len(ys), block)]
    parts = parallel_map(_map_block, jobs, workers)
    times, rows, snap_rows, counts = {}, [], [], {}
    k = 0
    for r in regimes:
        alarm, lin = [], []
        for _ in range(0, len(ys), block):
            a, l = parts[k]
            alarm += a
            lin += l
            k += 1
        times[r] = np.array([np.inf if a is None else a for a in alarm]).reshape(len(ys), len(xs))
        for idx, (a, l) in enumerate(zip(alarm, lin)):
            j, i = divmod(idx, len(xs))
            rows.append((r, float(xs[i]), float(ys[j]), a, l))
        for t in snapshots_h:
            alarmed = times[r] <= t * 3600.0
            counts[f"{r}@{t:g}h"] = int(alarmed.sum())
            for j in range(len(ys)):
                for i in range(len(xs)):
                    snap_rows.append((r, float(t), float(xs[i]), float(ys[j]), bool(alarmed[j, i])))
    return CampaignResult(
        "alarm_map",
        {"alarm_map.csv": (["regime", "x_m", "y_m", "alarm_time_s", "linearity_time_s"], rows),
         "alarm_snapshots.csv": (["regime", "snapshot_h", "x_m", "y_m", "alarmed"], snap_rows)},
        {"alarmed_counts": counts, "grid": [len(xs), len(ys)]})


def alarmed_grids(result: CampaignResult) -> dict:
    """(regime, snapshot_h) -> boolean grid (ny, nx) from an alarm-map result."""
    rows = result.tables["alarm_snapshots.csv"][1]
    xs = sorted({r[2] for r in rows})
    ys = sorted({r[3] for r in rows})
    out = {}
    for reg, t, x, y, a in rows:
        g = out.setdefault((reg, t), np.zeros((len(ys), len(xs)), dtype=bool))
        g[ys.index(y), xs.index(x)] = a
    return out


def run_single_glv_comparison(setup: Setup, horizon_s: float | None = None, order=MOLECULES) -> CampaignResult:
    """HEXVic build-up when the same carbon flux is spent on one molecule only."""
    c = setup.campaign("single_glv_comparison")
    horizon_s = horizon_s or c["horizon_s"]
    budget, scenarios = carbon_budget_amplitudes(setup.amplitudes(), setup.carbons())
    path = wind(setup, horizon_s, c["regime"])
    rx = setup.raw["geometry"]["rx_glv"]
    runs = {}
    for m in order:
        runs[m] = run_point(setup, rx, horizon_s, amplitudes=scenarios[m], path=path)
    times = runs[order[0]].trajectory.times
    header = ["time_s", *(f"c_v_{m}_only" for m in MOLECULES)]
    cols = [runs[m].trajectory["c_v"] for m in MOLECULES]
    rows = [(float(t), *(float(col[n]) for col in cols)) for n, t in enumerate(times)]
    final = {m: float(runs[m].trajectory["c_v"][-1]) for m in MOLECULES}
    return CampaignResult("single_glv_comparison", {"single_glv.csv": (header, rows)},
                          {"carbon_budget_mol_c_per_s": budget,
                           "amplitudes": {m: scenarios[m][m] for m in MOLECULES},
                           "final_c_v_um": final,
                           "alarm_time_s": {m: _t(runs[m].alarm_time) for m in MOLECULES}})
