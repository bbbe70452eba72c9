"""Configuration-driven parameter sweeps and figure presets.

A run is described by a flat JSON document (see README for the schema):
an engine selection (analytic, fock, or both), one coupling profile and
one initial state -- any of whose numeric fields may be lists, in which
case the run expands to the cartesian product of parameter points -- a
uniform tau grid on [0, tau_max], optional asymptotic columns, and an
output file.  Output is one CSV row per (parameter point, engine, tau),
plus a JSON sidecar with the config echo and run diagnostics.

Identical configs produce byte-identical CSVs regardless of the worker
count: points are computed independently (possibly in a process pool)
and written in a fixed order.
"""

from __future__ import annotations

import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ._version import __version__
from .coefficients import coeffs_for_profile
from .coupling import CONSTANT, MODULATED, TABULATED, CouplingProfile
from .covariance import (CoherentMech, InitialState, ThermalMech,
                         covariance_from_moments, moments_for_initial)
from .entropy import (delta as delta_measure, delta_large_mu, delta_small_mu,
                      entropy_difference_bound, initial_entropy)
from .errors import ConfigError, UnknownPreset
from .fock import (NoiseConfig, StepperConfig, Truncation, delta_numeric,
                   evolve_closed, evolve_lindblad, make_initial,
                   moments_numeric, suggest_truncation, truncation_check,
                   von_neumann_entropy)

ENGINES = ("analytic", "fock", "both")
FORMATS = ("csv", "json")
DEFAULT_COMPARE_TOL = 1e-3


@dataclass(frozen=True)
class PointSpec:
    """One fully resolved parameter point of a sweep."""

    profile_kind: str
    g0: float | None = None
    epsilon: float | None = None
    omega0: float | None = None
    samples: tuple = ()
    mu_c: complex = 0j
    mech_kind: str = "coherent"
    mu_m: complex | None = 0j
    nbar: float | None = None
    kappa_c: float = 0.0
    kappa_m: float = 0.0

    def profile(self) -> CouplingProfile:
        if self.profile_kind == CONSTANT:
            return CouplingProfile.constant(self.g0)
        if self.profile_kind == MODULATED:
            return CouplingProfile.modulated(self.g0, self.epsilon, self.omega0)
        return CouplingProfile.tabulated(self.samples)

    def initial(self) -> InitialState:
        if self.mech_kind == "thermal":
            return InitialState(mu_c=self.mu_c, mechanics=ThermalMech(self.nbar))
        return InitialState(mu_c=self.mu_c, mechanics=CoherentMech(self.mu_m))

    def noise(self) -> NoiseConfig:
        return NoiseConfig(kappa_c=self.kappa_c, kappa_m=self.kappa_m)


@dataclass(frozen=True)
class AsymptoticFlags:
    small_mu: bool = False
    large_mu: bool = False
    leading_log: bool = False


@dataclass(frozen=True)
class RunConfig:
    """Validated, expandable description of one sweep."""

    engine: str
    points: tuple
    tau_max: float
    tau_steps: int
    asymptotics: AsymptoticFlags = AsymptoticFlags()
    output_path: str = "sweep.csv"
    output_format: str = "csv"
    workers: int = 1
    truncation: Truncation | None = None
    stepper: StepperConfig = StepperConfig()
    tolerance: float = DEFAULT_COMPARE_TOL

    def tau_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.tau_max, self.tau_steps)


def _as_list(value):
    if isinstance(value, (list, tuple)) and not _is_complex_pair(value):
        return list(value)
    return [value]


def _is_complex_pair(value):
    return (isinstance(value, (list, tuple)) and len(value) == 2
            and all(isinstance(v, (int, float)) for v in value))


def _as_complex(value, name):
    if isinstance(value, (int, float)):
        return complex(value)
    if _is_complex_pair(value):
        return complex(value[0], value[1])
    raise ConfigError(f"{name} must be a number or an [re, im] pair, got {value!r}")


def parse_config(doc: dict) -> RunConfig:
    """Validate a JSON document and expand it into a RunConfig."""
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    engine = doc.get("engine", "analytic")
    if engine not in ENGINES:
        raise ConfigError(f"engine must be one of {ENGINES}, got {engine!r}")

    prof = doc.get("profile")
    if not isinstance(prof, dict) or "kind" not in prof:
        raise ConfigError("profile must be an object with a 'kind'")
    kind = prof["kind"]
    if kind not in (CONSTANT, MODULATED, TABULATED):
        raise ConfigError(f"unknown profile kind {kind!r}")

    init = doc.get("initial")
    if not isinstance(init, dict) or "mu_c" not in init:
        raise ConfigError("initial must be an object with 'mu_c'")
    mech = init.get("mechanics", {"kind": "coherent", "mu_m": 0.0})
    mech_kind = mech.get("kind", "coherent")
    if mech_kind not in ("coherent", "thermal"):
        raise ConfigError(f"mechanics kind must be coherent or thermal, got {mech_kind!r}")

    noise = doc.get("noise", {})
    tau_max = doc.get("tau_max")
    tau_steps = doc.get("tau_steps")
    if not isinstance(tau_max, (int, float)) or tau_max <= 0:
        raise ConfigError("tau_max must be a positive number")
    if not isinstance(tau_steps, int) or tau_steps < 2:
        raise ConfigError("tau_steps must be an integer >= 2")

    asym = doc.get("asymptotics", {})
    flags = AsymptoticFlags(small_mu=bool(asym.get("small_mu", False)),
                            large_mu=bool(asym.get("large_mu", False)),
                            leading_log=bool(asym.get("leading_log", False)))

    out = doc.get("output", {})
    out_path = out.get("path", "sweep.csv")
    out_format = out.get("format", "csv")
    if out_format not in FORMATS:
        raise ConfigError(f"output format must be one of {FORMATS}")

    workers = doc.get("workers", 1)
    if not isinstance(workers, int) or workers < 1:
        raise ConfigError("workers must be an integer >= 1")

    trunc = None
    if "truncation" in doc:
        t = doc["truncation"]
        trunc = Truncation(n_photon=int(t["n_photon"]), n_phonon=int(t["n_phonon"]),
                           budget=int(t.get("budget", 4096)))
    stepper = StepperConfig(dt=float(doc.get("stepper", {}).get("dt", 1e-3)))
    tolerance = float(doc.get("tolerance", DEFAULT_COMPARE_TOL))

    # cartesian expansion over every list-valued field
    if kind == TABULATED:
        samples = tuple((float(t), float(g)) for t, g in prof.get("samples", ()))
        g0s, epss, om0s = [None], [None], [None]
    else:
        samples = ()
        g0s = [float(v) for v in _as_list(prof.get("g0", 0.0))]
        epss = ([float(v) for v in _as_list(prof.get("epsilon", 0.0))]
                if kind == MODULATED else [None])
        om0s = ([float(v) for v in _as_list(prof.get("omega0", 0.0))]
                if kind == MODULATED else [None])

    mu_cs = [_as_complex(v, "mu_c") for v in _as_list(init["mu_c"])]
    if mech_kind == "thermal":
        mu_ms, nbars = [None], [float(v) for v in _as_list(mech.get("nbar", 0.0))]
    else:
        mu_ms = [_as_complex(v, "mu_m") for v in _as_list(mech.get("mu_m", 0.0))]
        nbars = [None]
    kcs = [float(v) for v in _as_list(noise.get("kappa_c", 0.0))]
    kms = [float(v) for v in _as_list(noise.get("kappa_m", 0.0))]

    points = tuple(
        PointSpec(profile_kind=kind, g0=g0, epsilon=eps, omega0=om0,
                  samples=samples, mu_c=mc, mech_kind=mech_kind,
                  mu_m=mm, nbar=nb, kappa_c=kc, kappa_m=km)
        for g0, eps, om0, mc, mm, nb, kc, km in itertools.product(
            g0s, epss, om0s, mu_cs, mu_ms, nbars, kcs, kms))

    if engine == "analytic" and any(p.kappa_c or p.kappa_m for p in points):
        raise ConfigError("nonzero decay rates require the fock engine")

    return RunConfig(engine=engine, points=points, tau_max=float(tau_max),
                     tau_steps=tau_steps, asymptotics=flags,
                     output_path=out_path, output_format=out_format,
                     workers=workers, truncation=trunc, stepper=stepper,
                     tolerance=tolerance)


def load_config(path) -> RunConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(doc)


# --------------------------------------------------------------------------
# row computation


def _asym_columns(flags: AsymptoticFlags, coeffs, mu_c, tau):
    cols = {}
    if flags.small_mu:
        cols["delta_small_mu"] = delta_small_mu(coeffs.f_complex, mu_c)
    if flags.large_mu or flags.leading_log:
        full, leading = delta_large_mu(coeffs.theta_a, coeffs.f_complex, mu_c, tau)
        if flags.large_mu:
            cols["delta_large_mu"] = full
        if flags.leading_log:
            cols["delta_leading"] = leading
    return cols


def _analytic_rows(point: PointSpec, grid, flags: AsymptoticFlags):
    profile = point.profile()
    initial = point.initial()
    rows = []
    for tau in grid:
        coeffs = coeffs_for_profile(profile, float(tau))
        sigma = covariance_from_moments(moments_for_initial(coeffs, initial))
        result = delta_measure(sigma, initial)
        row = {"tau": float(tau), "delta": result.delta,
               "nu_plus": result.pair.nu_plus, "nu_minus": result.pair.nu_minus,
               "witness": entropy_difference_bound(sigma, result.entropy_initial),
               "engine": "analytic"}
        row.update(_asym_columns(flags, coeffs, point.mu_c, float(tau)))
        rows.append(row)
    return rows, {}


def _fock_rows(point: PointSpec, grid, flags: AsymptoticFlags,
               trunc: Truncation | None, stepper: StepperConfig):
    profile = point.profile()
    initial = point.initial()
    noise = point.noise()
    if trunc is None:
        trunc = suggest_truncation(profile, initial, float(grid[-1]))
    state = make_initial(initial, trunc)
    if noise.is_closed:
        traj = evolve_closed(state, profile, grid, stepper)
    else:
        traj = evolve_lindblad(state, profile, noise, grid, stepper)
    rows = []
    for snap in traj:
        sigma = covariance_from_moments(moments_numeric(snap))
        result = delta_numeric(snap)
        row = {"tau": snap.time, "delta": result.delta,
               "nu_plus": result.pair.nu_plus, "nu_minus": result.pair.nu_minus,
               "witness": entropy_difference_bound(sigma, result.entropy_initial),
               "engine": "fock"}
        coeffs = coeffs_for_profile(profile, snap.time)
        row.update(_asym_columns(flags, coeffs, point.mu_c, snap.time))
        rows.append(row)
    final_check = truncation_check(traj[-1], 1e-6)
    diag = {"truncation": [trunc.n_photon, trunc.n_phonon],
            "final_photon_tail": final_check.photon_tail,
            "final_phonon_tail": final_check.phonon_tail,
            "final_trace_defect": traj[-1].norm_defect()}
    return rows, diag


def _compute_point(args):
    """Worker entry point: all rows for one parameter point."""
    point, grid, engine, flags, trunc, stepper = args
    rows = []
    diag = {}
    if engine in ("analytic", "both"):
        a_rows, _ = _analytic_rows(point, grid, flags)
        rows.extend(a_rows)
    if engine in ("fock", "both"):
        f_rows, diag = _fock_rows(point, grid, flags, trunc, stepper)
        rows.extend(f_rows)
    return rows, diag


_PARAM_COLUMNS = ("g0", "epsilon", "omega0", "mu_c_re", "mu_c_im",
                  "mu_m_re", "mu_m_im", "nbar", "kappa_c", "kappa_m")


def _point_columns(point: PointSpec) -> dict:
    return {
        "g0": point.g0, "epsilon": point.epsilon, "omega0": point.omega0,
        "mu_c_re": point.mu_c.real, "mu_c_im": point.mu_c.imag,
        "mu_m_re": None if point.mu_m is None else point.mu_m.real,
        "mu_m_im": None if point.mu_m is None else point.mu_m.imag,
        "nbar": point.nbar, "kappa_c": point.kappa_c, "kappa_m": point.kappa_m,
    }


def _columns(flags: AsymptoticFlags):
    cols = ["tau", "delta", "nu_plus", "nu_minus"]
    if flags.small_mu:
        cols.append("delta_small_mu")
    if flags.large_mu:
        cols.append("delta_large_mu")
    if flags.leading_log:
        cols.append("delta_leading")
    cols += ["witness", "engine"]
    cols += list(_PARAM_COLUMNS)
    return cols


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    return format(float(value), ".17g")


def _collect_rows(config: RunConfig):
    grid = config.tau_grid()
    jobs = [(p, grid, config.engine, config.asymptotics, config.truncation,
             config.stepper) for p in config.points]
    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_compute_point, jobs))
    else:
        results = [_compute_point(j) for j in jobs]

    all_rows = []
    diags = []
    for point, (rows, diag) in zip(config.points, results):
        pcols = _point_columns(point)
        for row in rows:
            row.update(pcols)
        all_rows.extend(rows)
        if diag:
            diags.append(diag)
    return all_rows, diags


def _write_output(config: RunConfig, rows, diags, wall_time, extra=None):
    cols = _columns(config.asymptotics)
    path = Path(config.output_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if config.output_format == "csv":
        lines = [",".join(cols)]
        lines += [",".join(_fmt(row.get(c)) for c in cols) for row in rows]
        path.write_text("\n".join(lines) + "\n")
    else:
        payload = [{c: row.get(c) for c in cols} for row in rows]
        path.write_text(json.dumps(payload, indent=1) + "\n")

    sidecar = {
        "version": __version__,
        "config": _config_echo(config),
        "rows": len(rows),
        "truncation_diagnostics": diags,
        "wall_time_s": wall_time,
    }
    if extra:
        sidecar.update(extra)
    meta_path = path.with_suffix(path.suffix + ".meta.json") if path.suffix != ".csv" \
        else path.with_name(path.stem + ".meta.json")
    meta_path.write_text(json.dumps(sidecar, indent=1, default=str) + "\n")
    return path, meta_path


def _config_echo(config: RunConfig) -> dict:
    return {
        "engine": config.engine,
        "points": len(config.points),
        "tau_max": config.tau_max,
        "tau_steps": config.tau_steps,
        "asymptotics": vars(config.asymptotics),
        "workers": config.workers,
        "truncation": None if config.truncation is None
        else [config.truncation.n_photon, config.truncation.n_phonon],
        "stepper_dt": config.stepper.dt,
        "output": config.output_path,
    }


def run_sweep(config: RunConfig):
    """Run all parameter points and write the data file plus sidecar.

    Returns (data_path, sidecar_path, rows).
    """
    start = time.perf_counter()
    rows, diags = _collect_rows(config)
    extra = None
    if config.engine == "both":
        extra = {"cross_engine": _cross_engine_stats(rows, config.tolerance)}
    data, meta = _write_output(config, rows, diags, time.perf_counter() - start, extra)
    return data, meta, rows


def _cross_engine_stats(rows, tolerance):
    by_key = {}
    for row in rows:
        key = tuple(row.get(c) for c in _PARAM_COLUMNS) + (row["tau"],)
        by_key.setdefault(key, {})[row["engine"]] = row["delta"]
    diffs = [abs(v["analytic"] - v["fock"]) for v in by_key.values()
             if "analytic" in v and "fock" in v]
    if not diffs:
        return {"max_abs_delta_diff": None, "mean_abs_delta_diff": None,
                "tolerance": tolerance, "passed": None}
    return {"max_abs_delta_diff": max(diffs),
            "mean_abs_delta_diff": sum(diffs) / len(diffs),
            "tolerance": tolerance, "passed": max(diffs) <= tolerance}


def compare_engines(config: RunConfig):
    """Run both engines and emit a machine-readable discrepancy report.

    Returns (report_path, report_dict).  The report lists the per-tau
    absolute discrepancy in delta for every parameter point, the max and
    mean, and a pass/fail verdict against ``config.tolerance``.
    """
    if config.engine != "both":
        config = replace(config, engine="both")
    rows, _ = _collect_rows(config)
    by_key = {}
    for row in rows:
        key = tuple(row.get(c) for c in _PARAM_COLUMNS) + (row["tau"],)
        by_key.setdefault(key, {})[row["engine"]] = row["delta"]
    points = []
    for key in sorted(by_key, key=lambda k: tuple(-math.inf if v is None else v for v in k)):
        vals = by_key[key]
        if "analytic" not in vals or "fock" not in vals:
            continue
        points.append({
            "tau": key[-1],
            "delta_analytic": vals["analytic"],
            "delta_fock": vals["fock"],
            "abs_diff": abs(vals["analytic"] - vals["fock"]),
        })
    diffs = [p["abs_diff"] for p in points]
    report = {
        "version": __version__,
        "config": _config_echo(config),
        "points": points,
        "max_abs_diff": max(diffs) if diffs else None,
        "mean_abs_diff": sum(diffs) / len(diffs) if diffs else None,
        "tolerance": config.tolerance,
        "passed": (max(diffs) <= config.tolerance) if diffs else None,
    }
    path = Path(config.output_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report, indent=1) + "\n")
    return path, report


# --------------------------------------------------------------------------
# figure presets
#
# Panels whose source material does not pin every curve parameter use the
# representative values recorded here; they are documented defaults, not
# claims of exactness.

_TWO_PI = 2.0 * math.pi
_SIX_PI = 6.0 * math.pi


def _preset_doc(doc: dict) -> dict:
    doc = dict(doc)
    doc.setdefault("workers", 1)
    return doc


def _analytic_preset(profile, mu_c, tau_max, steps, asym=None, mechanics=None):
    return _preset_doc({
        "engine": "analytic",
        "profile": profile,
        "initial": {"mu_c": mu_c, "mechanics": mechanics or {"kind": "coherent", "mu_m": 0.0}},
        "tau_max": tau_max,
        "tau_steps": steps,
        "asymptotics": asym or {},
    })


def _fock_preset(profile, mu_c, noise, tau_max, steps, trunc, dt=1e-3):
    return _preset_doc({
        "engine": "fock",
        "profile": profile,
        "initial": {"mu_c": mu_c, "mechanics": {"kind": "coherent", "mu_m": 0.0}},
        "noise": noise,
        "tau_max": tau_max,
        "tau_steps": steps,
        "truncation": {"n_photon": trunc[0], "n_phonon": trunc[1]},
        "stepper": {"dt": dt},
    })


FIGURE_PRESETS = {
    # non-Gaussianity vs time, constant coupling, several drive amplitudes
    "fig2a": lambda: _analytic_preset({"kind": CONSTANT, "g0": 1.0},
                                      [1.0, 2.0, 5.0, 10.0], _TWO_PI, 401),
    # close-up of the dip near tau = pi (dense grid)
    "fig2b": lambda: _analytic_preset({"kind": CONSTANT, "g0": 1.0},
                                      [2.0, 5.0, 10.0, 20.0], _TWO_PI, 2001),
    # early-time growth (dense small-tau grid; plot on a log scale)
    "fig2c": lambda: _analytic_preset({"kind": CONSTANT, "g0": 1.0},
                                      [1.0, 2.0, 5.0, 10.0], 0.5, 501),
    # delta(pi) vs coupling strength
    "fig3a": lambda: _analytic_preset(
        {"kind": CONSTANT, "g0": list(np.geomspace(0.1, 10.0, 25))},
        [1.0, 2.0, 5.0], math.pi, 2),
    # delta(pi) vs optical amplitude
    "fig3b": lambda: _analytic_preset(
        {"kind": CONSTANT, "g0": [0.5, 1.0, 2.0]},
        list(np.geomspace(0.01, 100.0, 25)), math.pi, 2),
    # exact vs large-amplitude approximation, varying mu_c
    "fig4a": lambda: _analytic_preset({"kind": CONSTANT, "g0": 1.0},
                                      [1.0, 2.0, 10.0], _TWO_PI, 401,
                                      asym={"large_mu": True, "leading_log": True}),
    # exact vs large-amplitude approximation, varying g0
    "fig4b": lambda: _analytic_preset({"kind": CONSTANT, "g0": [1.0, 10.0, 100.0]},
                                      10.0, _TWO_PI, 401,
                                      asym={"large_mu": True}),
    # open dynamics, constant coupling, photon decay
    "fig5a": lambda: _fock_preset({"kind": CONSTANT, "g0": 1.0}, 0.1,
                                  {"kappa_c": [0.1, 0.2, 0.3]}, _SIX_PI, 121, (6, 48)),
    # open dynamics, constant coupling, phonon decay
    "fig5b": lambda: _fock_preset({"kind": CONSTANT, "g0": 1.0}, 0.1,
                                  {"kappa_m": [0.1, 0.2, 0.3]}, _SIX_PI, 121, (6, 48)),
    # modulated coupling, several modulation frequencies (1.0 = resonance)
    "fig6a": lambda: _analytic_preset(
        {"kind": MODULATED, "g0": 1.0, "epsilon": 1.0, "omega0": [0.0, 0.5, 2.0, 1.0]},
        1.0, _SIX_PI, 601),
    # resonant modulation, varying mu_c: no recurrences
    "fig6b": lambda: _analytic_preset(
        {"kind": MODULATED, "g0": 1.0, "epsilon": 1.0, "omega0": 1.0},
        [1.0, 2.0, 5.0, 10.0], _SIX_PI, 601),
    # resonant modulation, varying modulation amplitude
    "fig6c": lambda: _analytic_preset(
        {"kind": MODULATED, "g0": 1.0, "epsilon": [0.5, 1.0, 2.0, 4.0], "omega0": 1.0},
        1.0, _SIX_PI, 601),
    # off-resonant modulation vs large-amplitude approximation
    "fig7a": lambda: _analytic_preset(
        {"kind": MODULATED, "g0": 1.0, "epsilon": 1.0, "omega0": 0.5},
        [1.0, 2.0, 10.0], _SIX_PI, 601, asym={"large_mu": True}),
    # resonant modulation vs large-amplitude approximation, varying epsilon
    "fig7b": lambda: _analytic_preset(
        {"kind": MODULATED, "g0": 1.0, "epsilon": [1.0, 2.0, 4.0], "omega0": 1.0},
        10.0, _SIX_PI, 601, asym={"large_mu": True}),
    # open dynamics at resonance, photon decay (noise-tolerant growth)
    "fig8a": lambda: _fock_preset(
        {"kind": MODULATED, "g0": 1.0, "epsilon": 0.5, "omega0": 1.0}, 0.1,
        {"kappa_c": [0.1, 0.2, 0.3]}, _SIX_PI, 121, (5, 110)),
    # open dynamics at resonance, phonon decay
    "fig8b": lambda: _fock_preset(
        {"kind": MODULATED, "g0": 1.0, "epsilon": 0.5, "omega0": 1.0}, 0.1,
        {"kappa_m": [0.1, 0.2, 0.3]}, _SIX_PI, 121, (5, 110)),
}


def figure_config(preset_id: str, out_dir) -> RunConfig:
    """Expand a preset id into its RunConfig (deterministic)."""
    if preset_id not in FIGURE_PRESETS:
        raise UnknownPreset(f"unknown figure preset {preset_id!r}; "
                            f"known: {', '.join(sorted(FIGURE_PRESETS))}")
    doc = FIGURE_PRESETS[preset_id]()
    doc["output"] = {"path": str(Path(out_dir) / f"{preset_id}.csv"), "format": "csv"}
    return parse_config(doc)


def reproduce_figure(preset_id: str, out_dir):
    """Run a figure preset; one CSV per panel plus a sidecar."""
    return run_sweep(figure_config(preset_id, out_dir))
