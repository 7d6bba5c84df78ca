"""Command-line front end.

Four subcommands: `simulate` runs a configured trajectory and writes a
CSV plus a JSON report, `verify` runs one named identity suite, `algebra`
dumps algebra data as JSON, and `plot` turns a trajectory CSV into a
gnuplot script.  Configuration is a single JSON file; the only
environment variable consulted is GCS_LOG (logging level).

Exit codes: 0 success, 1 a verification suite failed, 2 bad usage or
configuration, 3 the integrator hit a singular configuration (partial
output is kept and the event is recorded in the report).

Everything written is deterministic for a fixed config and seed: floats
are serialized with shortest round-trip repr, JSON keys are sorted, and
timing data stays out of reports unless --timings is passed.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time

import numpy as np

from .liealg import algebra_json, build_chevalley, representation
from .phase import (
    GcsState,
    SingularConfigurationError,
    hamiltonian_gcs,
    random_regular_state,
)
from .dynamics import integrate
from .lax import integrals, lax_residual, spectral_lax_intro
from .verify import SUITE_NAMES, conventions, run_suite

log = logging.getLogger("gcs")

FAMILIES = ("A", "B", "C", "D", "E", "F", "G")


class ConfigError(Exception):
    pass


def _setup_logging():
    level = os.environ.get("GCS_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _json_default(obj):
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)!r}")


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_json_default)


# ---------------------------------------------------------------------------
# configuration


def _require(cfg: dict, key: str, typ, what: str):
    if key not in cfg:
        raise ConfigError(f"missing {what}.{key}")
    if typ is not None and not isinstance(cfg[key], typ):
        raise ConfigError(f"{what}.{key} must be {typ}")
    return cfg[key]


def _spin_vector(raw, n_pos: int, name: str) -> np.ndarray:
    """Spin data comes either as a dense list or as a sparse map from
    positive-root index to value."""
    vec = np.zeros(n_pos)
    if isinstance(raw, dict):
        for k, val in raw.items():
            i = int(k)
            if not 0 <= i < n_pos:
                raise ConfigError(f"initial.{name} index {i} out of range")
            vec[i] = float(val)
    elif isinstance(raw, list):
        if len(raw) != n_pos:
            raise ConfigError(f"initial.{name} needs {n_pos} entries")
        vec[:] = [float(x) for x in raw]
    else:
        raise ConfigError(f"initial.{name} must be a list or an index map")
    return vec


def load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")

    alg_cfg = _require(cfg, "algebra", dict, "config")
    family = _require(alg_cfg, "family", str, "algebra")
    if family not in FAMILIES:
        raise ConfigError(f"algebra.family must be one of {FAMILIES}")
    rank = _require(alg_cfg, "rank", int, "algebra")
    alg_cfg.setdefault("rep", "auto")

    integ = cfg.setdefault("integrator", {})
    integ.setdefault("method", "rk4")
    integ.setdefault("dt", 1e-3)
    integ.setdefault("steps", 10000)
    integ.setdefault("monitor_stride", 10)
    if integ["method"] not in ("rk4", "rk45-adaptive"):
        raise ConfigError("integrator.method must be rk4 or rk45-adaptive")
    if not (isinstance(integ["dt"], (int, float)) and integ["dt"] > 0):
        raise ConfigError("integrator.dt must be positive")
    if not (isinstance(integ["steps"], int) and integ["steps"] > 0):
        raise ConfigError("integrator.steps must be a positive integer")
    if not (isinstance(integ["monitor_stride"], int) and integ["monitor_stride"] > 0):
        raise ConfigError("integrator.monitor_stride must be a positive integer")

    mon = cfg.setdefault("monitors", {})
    mon.setdefault("energy", True)
    mon.setdefault("integrals", [])
    mon.setdefault("lax_residual", False)
    mon.setdefault("spectral_points", [])
    mon.setdefault("casimirs", False)
    for x in mon["spectral_points"]:
        if not isinstance(x, (int, float)):
            raise ConfigError("monitors.spectral_points must be numbers")
        if abs(x) < 1e-3 or abs(x - 1.0) < 1e-3 or abs(math.sinh(x)) < 1e-3:
            raise ConfigError(f"spectral point {x} too close to a pole")

    out = cfg.setdefault("output", {})
    out.setdefault("trajectory_path", "trajectory.csv")
    out.setdefault("report_path", "report.json")
    out.setdefault("plot_script", False)
    out.setdefault("figures", None)

    if "initial" not in cfg:
        cfg["initial"] = {"seed": 0}
    return cfg


def build_initial_state(cfg: dict, alg) -> tuple[GcsState, int | None]:
    init = cfg["initial"]
    rank, n_pos = alg.rs.rank, alg.rs.n_pos
    if "u" in init:
        u = np.asarray(init.get("u"), dtype=float)
        v = np.asarray(init.get("v", [0.0] * rank), dtype=float)
        if u.shape != (rank,) or v.shape != (rank,):
            raise ConfigError(f"initial.u and initial.v need {rank} entries")
        T = _spin_vector(init.get("T", {}), n_pos, "T")
        S = _spin_vector(init.get("S", {}), n_pos, "S")
        return GcsState(u, v, T, S), None
    seed = int(init.get("seed", 0))
    rng = np.random.default_rng(seed)
    kw = {}
    if "spin_norm" in init:
        kw["spin_norm"] = float(init["spin_norm"])
    if "u_box" in init:
        box = init["u_box"]
        if not (isinstance(box, list) and len(box) == 2):
            raise ConfigError("initial.u_box must be [lo, hi]")
        kw["u_box"] = (float(box[0]), float(box[1]))
    if "margin" in init:
        kw["margin"] = float(init["margin"])
    if "v_scale" in init:
        kw["v_scale"] = float(init["v_scale"])
    return random_regular_state(alg, rng, **kw), seed


# ---------------------------------------------------------------------------
# simulate


def _integral_pairs(cfg: dict, alg) -> list[tuple[int, int]]:
    degrees = alg.rs.degrees
    pairs = []
    for item in cfg["monitors"]["integrals"]:
        if not (isinstance(item, list) and len(item) == 2):
            raise ConfigError("monitors.integrals entries must be [j, k] pairs")
        j, k = int(item[0]), int(item[1])
        if not 1 <= j <= len(degrees):
            raise ConfigError(f"integral index j={j} out of range")
        if not 0 <= k <= degrees[j - 1]:
            raise ConfigError(f"integral index k={k} exceeds degree {degrees[j-1]}")
        pairs.append((j, k))
    if cfg["monitors"]["casimirs"]:
        for j in range(1, len(degrees) + 1):
            if (j, 0) not in pairs:
                pairs.append((j, 0))
    return pairs


def _csv_float(x: float) -> str:
    return repr(float(x))


def _csv_header(alg, pairs, want_lax, spectral_points) -> list[str]:
    rs = alg.rs
    cols = ["t"]
    cols += [f"u_{j}" for j in range(1, rs.rank + 1)]
    cols += [f"v_{j}" for j in range(1, rs.rank + 1)]
    cols += [f"T_{rs.label(i)}" for i in range(rs.n_pos)]
    cols += [f"S_{rs.label(i)}" for i in range(rs.n_pos)]
    cols.append("H")
    cols += [f"I_{j}_{k}" for j, k in pairs]
    if want_lax:
        cols.append("lax_res")
    cols += [f"trL2_{_csv_float(x)}" for x in spectral_points]
    return cols


def cmd_simulate(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    t0 = time.monotonic()
    try:
        alg = build_chevalley(family=cfg["algebra"]["family"],
                              rank=cfg["algebra"]["rank"])
        rep = representation(alg, cfg["algebra"]["rep"])
        state0, seed = build_initial_state(cfg, alg)
        pairs = _integral_pairs(cfg, alg)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        _ = hamiltonian_gcs(state0, alg)
    except SingularConfigurationError as exc:
        print(f"config error: initial state singular: {exc}", file=sys.stderr)
        return 2

    integ = cfg["integrator"]
    mon = cfg["monitors"]
    traj = integrate(state0, alg, dt=float(integ["dt"]), steps=integ["steps"],
                     method=integ["method"], monitor_stride=integ["monitor_stride"])
    log.info("integrated %d steps, %d stored states", integ["steps"], len(traj.states))

    out_path = args.out or cfg["output"]["trajectory_path"]
    spectral = [float(x) for x in mon["spectral_points"]]
    want_lax = bool(mon["lax_residual"])
    cols = _csv_header(alg, pairs, want_lax, spectral)

    rows = []
    for t, st in zip(traj.times, traj.states):
        row = [t]
        row += list(st.u) + list(st.v) + list(st.T) + list(st.S)
        row.append(hamiltonian_gcs(st, alg))
        if pairs:
            table = integrals(st, alg, rep)
            row += [table[p] for p in pairs]
        if want_lax:
            row.append(lax_residual(st, alg, rep))
        for x in spectral:
            V = spectral_lax_intro(st, alg, rep, x).value
            row.append(float(np.trace(V @ V).real))
        rows.append(row)

    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(cols) + "\n")
        for row in rows:
            fh.write(",".join(_csv_float(x) for x in row) + "\n")

    arr = np.array(rows)
    drift = {}
    h_col = cols.index("H")
    if mon["energy"]:
        drift["H"] = float(np.max(np.abs(arr[:, h_col] - arr[0, h_col])))
    for idx, p in enumerate(pairs):
        c = h_col + 1 + idx
        drift[f"I_{p[0]}_{p[1]}"] = float(np.max(np.abs(arr[:, c] - arr[0, c])))
    for k, x in enumerate(spectral):
        c = len(cols) - len(spectral) + k
        drift[f"trL2_{_csv_float(x)}"] = float(np.max(np.abs(arr[:, c] - arr[0, c])))

    report = {
        "algebra": {"family": cfg["algebra"]["family"],
                    "rank": cfg["algebra"]["rank"],
                    "rep": cfg["algebra"]["rep"],
                    "dim": alg.dim,
                    "positive_roots": alg.rs.n_pos,
                    "degrees": list(alg.rs.degrees),
                    "rank_u": alg.rs.rank_u},
        "seed": seed,
        "integrator": {"method": integ["method"], "dt": float(integ["dt"]),
                       "steps": integ["steps"],
                       "monitor_stride": integ["monitor_stride"]},
        "columns": cols,
        "rows": len(rows),
        "drift": drift,
        "lax_residual_max": (float(np.max(arr[:, cols.index("lax_res")]))
                             if want_lax else None),
        "event": traj.event,
        "conventions": conventions(),
        "trajectory_path": out_path,
    }
    if args.timings:
        report["wall_seconds"] = time.monotonic() - t0
    with open(cfg["output"]["report_path"], "w", encoding="utf-8") as fh:
        fh.write(_dump_json(report) + "\n")

    if cfg["output"]["plot_script"]:
        script = _gnuplot_script(out_path, cols)
        with open(_script_path(out_path), "w", encoding="utf-8") as fh:
            fh.write(script)
    if cfg["output"]["figures"]:
        _render_figures(cfg["output"]["figures"], arr, cols, alg.rs.rank)

    if traj.event is not None:
        log.warning("singular event: %s", traj.event)
        print(f"singular configuration: {traj.event}; partial trajectory "
              f"written to {out_path}", file=sys.stderr)
        return 3
    print(f"wrote {out_path} ({len(rows)} rows) and "
          f"{cfg['output']['report_path']}")
    return 0


def _render_figures(dirpath: str, arr: np.ndarray, cols: list[str], rank: int):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    os.makedirs(dirpath, exist_ok=True)
    t = arr[:, 0]
    fig, ax = plt.subplots(figsize=(7, 4))
    for j in range(1, rank + 1):
        ax.plot(t, arr[:, cols.index(f"u_{j}")], label=f"u_{j}")
    ax.set_xlabel("t")
    ax.set_ylabel("radial coordinates")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(os.path.join(dirpath, "radial.png"), dpi=120)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(7, 4))
    h = arr[:, cols.index("H")]
    ax.plot(t, h - h[0])
    ax.set_xlabel("t")
    ax.set_ylabel("H(t) - H(0)")
    fig.tight_layout()
    fig.savefig(os.path.join(dirpath, "energy_drift.png"), dpi=120)
    plt.close(fig)

    int_cols = [c for c in cols if c.startswith("I_")]
    if int_cols:
        fig, ax = plt.subplots(figsize=(7, 4))
        for c in int_cols:
            y = arr[:, cols.index(c)]
            ax.plot(t, y - y[0], label=c)
        ax.set_xlabel("t")
        ax.set_ylabel("integral drift")
        ax.legend(fontsize=8)
        fig.tight_layout()
        fig.savefig(os.path.join(dirpath, "integral_drift.png"), dpi=120)
        plt.close(fig)
    log.info("figures rendered to %s", dirpath)


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    t0 = time.monotonic()
    try:
        report = run_suite(args.suite, family=args.family, rank=args.rank,
                           seed=args.seed, tol=args.tol, samples=args.samples)
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    payload = report.to_dict()
    payload["conventions"] = conventions()
    alg_meta = {"family": args.family, "rank": args.rank}
    payload["algebra"] = alg_meta
    if args.timings:
        payload["wall_seconds"] = time.monotonic() - t0
    print(_dump_json(payload))
    status = "PASS" if report.passed else "FAIL"
    print(f"{status} suite={report.suite} family={args.family} "
          f"rank={args.rank} max_residual={report.max_residual:.3e}",
          file=sys.stderr)
    for f in report.findings:
        print(f"finding: {f}", file=sys.stderr)
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------
# algebra


def cmd_algebra(args) -> int:
    try:
        alg = build_chevalley(family=args.family, rank=args.rank)
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    data = algebra_json(alg)
    if args.emit == "roots":
        out = {"family": data["family"], "rank": data["rank"],
               "roots": data["roots"], "positive": data["positive"]}
    elif args.emit == "constants":
        out = {"family": data["family"], "rank": data["rank"], "C": data["C"]}
    elif args.emit == "degrees":
        out = {"family": data["family"], "rank": data["rank"],
               "degrees": data["degrees"], "rank_u": alg.rs.rank_u}
    elif args.emit == "adjoint":
        out = {"family": data["family"], "rank": data["rank"],
               "dim": alg.dim, "ad": alg.ad.tolist()}
    else:
        print(f"usage error: unknown emit {args.emit!r}", file=sys.stderr)
        return 2
    print(_dump_json(out))
    return 0


# ---------------------------------------------------------------------------
# plot


def _script_path(csv_path: str) -> str:
    base, _ = os.path.splitext(csv_path)
    return base + ".gp"


def _gnuplot_script(csv_path: str, cols: list[str]) -> str:
    """Self-contained gnuplot script: radial coordinates, energy drift,
    and conserved-integral drift, using only columns present in the CSV.
    """
    u_cols = [(i + 1, c) for i, c in enumerate(cols) if c.startswith("u_")]
    h_col = cols.index("H") + 1
    i_cols = [(i + 1, c) for i, c in enumerate(cols) if c.startswith("I_")]
    panels = 2 + (1 if i_cols else 0)
    lines = [
        "# generated by gcs plot",
        f"infile = '{os.path.basename(csv_path)}'",
        "set datafile separator ','",
        "set key autotitle columnhead font ',8'",
        "set terminal pngcairo size 900,{}".format(300 * panels),
        "set output 'trajectory.png'",
        f"set multiplot layout {panels},1",
        "set xlabel 't'",
        "set ylabel 'u_j'",
        "plot " + ", ".join(f"infile using 1:{i} with lines title '{c}'"
                            for i, c in u_cols),
        f"stats infile using {h_col} every ::0::0 nooutput",
        "H0 = STATS_min",
        "set ylabel 'H(t) - H(0)'",
        f"plot infile using 1:(column({h_col}) - H0) with lines title 'energy drift'",
    ]
    if i_cols:
        lines.append("set ylabel 'integral drift'")
        plots = []
        for k, (i, c) in enumerate(i_cols):
            lines.append(f"stats infile using {i} every ::0::0 nooutput")
            lines.append(f"I0_{k} = STATS_min")
            plots.append(f"infile using 1:(column({i}) - I0_{k}) "
                         f"with lines title '{c}'")
        lines.append("plot " + ", ".join(plots))
    lines.append("unset multiplot")
    return "\n".join(lines) + "\n"


def cmd_plot(args) -> int:
    try:
        with open(args.infile, "r", encoding="utf-8") as fh:
            header = fh.readline().strip()
            first_data = fh.readline().strip()
    except OSError as exc:
        print(f"cannot read {args.infile}: {exc}", file=sys.stderr)
        return 2
    cols = header.split(",") if header else []
    if not header or not first_data or cols[0] != "t" or "H" not in cols:
        print(f"malformed or empty trajectory CSV: {args.infile}",
              file=sys.stderr)
        return 2
    script = _gnuplot_script(args.infile, cols)
    path = _script_path(args.infile)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(script)
    print(f"wrote {path}")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gcs",
                                description="spin Calogero-Sutherland toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("simulate", help="integrate a configured trajectory")
    ps.add_argument("--config", required=True)
    ps.add_argument("--out", default=None,
                    help="override output.trajectory_path")
    ps.add_argument("--timings", action="store_true")
    ps.set_defaults(func=cmd_simulate)

    pv = sub.add_parser("verify", help="run one verification suite")
    pv.add_argument("--suite", required=True, choices=SUITE_NAMES)
    pv.add_argument("--family", required=True, choices=FAMILIES)
    pv.add_argument("--rank", required=True, type=int)
    pv.add_argument("--seed", type=int, default=0)
    pv.add_argument("--tol", type=float, default=None)
    pv.add_argument("--samples", type=int, default=None)
    pv.add_argument("--timings", action="store_true")
    pv.set_defaults(func=cmd_verify)

    pa = sub.add_parser("algebra", help="export algebra data as JSON")
    pa.add_argument("--family", required=True, choices=FAMILIES)
    pa.add_argument("--rank", required=True, type=int)
    pa.add_argument("--emit", required=True,
                    choices=("roots", "constants", "degrees", "adjoint"))
    pa.set_defaults(func=cmd_algebra)

    pp = sub.add_parser("plot", help="emit a gnuplot script for a trajectory")
    pp.add_argument("--in", dest="infile", required=True)
    pp.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
