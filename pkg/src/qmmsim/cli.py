"""Configuration ingestion, run orchestration and tabular output.

Configs are flat ``key = value`` text files (``#`` comments).  Every run
writes ``manifest.json`` first (config echo, content hash, timestamps),
then one or more CSV files with a fixed numeric format, so identical
configs produce byte-identical tables.

Invocation: ``qmmsim <config-path> [--strict] [--jobs N]``.
Exit codes: 0 success, 1 config/validation, 2 numerical divergence or
non-convergence, 3 not-detected outcomes under --strict.
"""

import argparse
import difflib
import hashlib
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .analytics import (
    PeriodicPotential,
    QDParams,
    TransitionParams,
    bloch_bands,
    bragg_qd_stack,
    critical_temp_strong_disorder,
    critical_temp_weak_disorder,
    layered_transmission,
    qd_permittivity,
    quantum_transition_temp,
)
from .core import ModelParams, QubitParams, uniform_chain
from .errors import (
    ConfigError,
    ConvergenceError,
    DivergenceError,
    InternalError,
    QmmError,
    ValidationError,
)
from .fields import discrete_omega
from .qubits import SuperpositionProfile
from .scenarios import (
    PulseSpec,
    inverted_chain,
    run_breathing,
    run_lasing,
    run_priming,
    run_scattering,
)

# ---------------------------------------------------------------------------
# config schema


def _float_list(text):
    try:
        vals = [float(tok) for tok in str(text).split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad number list {text!r}: {exc}") from exc
    if not vals:
        raise ConfigError("empty number list")
    return vals


def _segments(text):
    segs = []
    for tok in str(text).split(","):
        tok = tok.strip()
        if not tok:
            continue
        parts = tok.split(":")
        if len(parts) != 2:
            raise ConfigError(f"segment {tok!r} must be length:value")
        segs.append((float(parts[0]), float(parts[1])))
    if not segs:
        raise ConfigError("segments must not be empty")
    return segs


def _bool(text):
    t = str(text).strip().lower()
    if t in ("true", "yes", "1", "on"):
        return True
    if t in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"bad boolean {text!r}")


COMMON_KEYS = {
    "command": (str, None),
    "seed": (int, 0),
    "output_dir": (str, "."),
}

#: per-command key schema: name -> (converter, default); None default = required
COMMAND_KEYS = {
    "temps": {
        "regime": (str, None),
        "delta0_K": (float, None),
        "m_eta2_N_K": (float, None),
        "n_qubits": (int, 1),
    },
    "bands": {
        "beta": (float, 1.0),
        "segments": (_segments, None),
        "omega_min": (float, 0.01),
        "omega_max": (float, 2.0),
        "n_omega": (int, 600),
    },
    "scatter": {
        "omega_min": (float, 0.9),
        "omega_max": (float, 1.1),
        "n_omega": (int, 9),
        "qubit_omega": (float, 1.0),
        "qubit_epsilon": (float, 0.0),
        "d0": (float, 0.173),
        "mutual_coupling": (float, 1.0),
        "drive_amplitude": (float, 0.002),
        "launch_side": (str, "left"),
    },
    "permittivity": {
        "mode": (str, "table"),
        "eps_b": (float, 2.25),
        "pop_factor": (float, 1.0),
        "osc_strength": (float, 1e-3),
        "omega0": (float, 1.0),
        "gamma": (float, 1e-3),
        "omega_min": (float, 0.5),
        "omega_max": (float, 1.5),
        "n_omega": (int, 501),
        "n_periods": (int, 8),
        "eps_hi": (float, 4.0),
    },
    "simulate": {
        "scenario": (str, None),
        # breathing
        "lambda_cells": (int, 8),
        "chi0": (float, 0.39269908169872414),
        "chi1": (float, 0.3),
        "qubit_epsilon_frac": (float, 0.6),
        "v0": (float, 0.2),
        "v_offset": (float, 0.3),
        "duration_periods": (float, 8.0),
        "samples_per_period": (int, 16),
        # priming
        "n_cells": (int, 0),
        "n_sites": (int, 192),
        "k0_mode": (int, 10),
        "amplitude": (float, 1.0),
        "envelope_width": (float, 70.0),
        "d0": (float, 0.01),
        "single_sided": (_bool, False),
        "exit_margin": (float, 2.0),
        # lasing
        "n_qubits": (int, 32),
        "amplitudes": (_float_list, None),
        "duration": (float, 6000.0),
        "ground_control": (_bool, False),
        "seed_amplitude": (float, 1e-6),
        "beta": (float, 3.0),
    },
}

SCENARIOS = ("breathing", "priming", "lasing")

#: keys meaningful per scenario (to reject stray ones early)
SCENARIO_KEYS = {
    "breathing": {"scenario", "lambda_cells", "chi0", "chi1", "qubit_epsilon_frac",
                  "v0", "v_offset", "duration_periods", "samples_per_period", "beta"},
    "priming": {"scenario", "n_cells", "n_sites", "k0_mode", "amplitude",
                "envelope_width", "d0", "single_sided", "exit_margin", "beta"},
    "lasing": {"scenario", "n_cells", "n_qubits", "d0", "amplitudes", "duration",
               "envelope_width", "ground_control", "seed_amplitude", "beta"},
}

#: lasing defaults calibrated for the sqrt(amplitude) onset law
LASING_DEFAULT_AMPLITUDES = [0.0225, 0.09, 0.36]

#: scenario-specific defaults that differ from the shared simulate schema
SCENARIO_DEFAULTS = {
    "lasing": {"d0": 0.19, "envelope_width": 50.0},
}


@dataclass
class RunConfig:
    command: str
    params: dict
    seed: int = 0
    output_dir: str = "."
    scenario: str | None = None

    def canonical_text(self):
        lines = [f"command = {self.command}"]
        if self.scenario is not None:
            lines.append(f"scenario = {self.scenario}")
        lines.append(f"seed = {self.seed}")
        lines.append(f"output_dir = {self.output_dir}")
        for k in sorted(self.params):
            v = self.params[k]
            if isinstance(v, bool):
                v = "true" if v else "false"
            elif isinstance(v, list):
                v = ",".join(repr(x) for x in v)
            elif isinstance(v, tuple):
                v = ",".join(f"{l}:{w}" for l, w in v)
            lines.append(f"{k} = {v}")
        return "\n".join(lines) + "\n"

    def content_hash(self):
        return hashlib.sha256(self.canonical_text().encode("utf-8")).hexdigest()


def _suggest(key, candidates):
    close = difflib.get_close_matches(key, candidates, n=1)
    return f"; nearest valid key: {close[0]}" if close else ""


def parse_config(text):
    """Parse and fully validate a flat key = value config."""
    raw = {}
    lines_of = {}
    for lineno, line in enumerate(str(text).splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}",
                              line=lineno)
        key, value = body.split("=", 1)
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key", line=lineno)
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}", line=lineno, key=key)
        raw[key] = value
        lines_of[key] = lineno

    if "command" not in raw:
        required = "command (one of: " + ", ".join(sorted(COMMAND_KEYS)) + ")"
        raise ConfigError(f"missing required key: {required}", key="command")
    command = raw.pop("command")
    if command not in COMMAND_KEYS:
        raise ConfigError(
            f"unknown command {command!r}; valid: {', '.join(sorted(COMMAND_KEYS))}",
            key="command",
        )

    schema = dict(COMMAND_KEYS[command])
    scenario = None
    if command == "simulate":
        scenario = raw.get("scenario")
        if scenario is None:
            raise ConfigError("simulate requires scenario = breathing|priming|lasing",
                              key="scenario")
        if scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {scenario!r}; valid: "
                              + ", ".join(SCENARIOS), key="scenario")
        allowed = SCENARIO_KEYS[scenario]
        schema = {k: v for k, v in schema.items() if k in allowed}

    valid_keys = set(schema) | {"seed", "output_dir"}
    parsed = {}
    for key, value in raw.items():
        if key == "scenario":
            continue
        if key not in valid_keys:
            raise ConfigError(
                f"unknown key {key!r} for command {command}"
                + (f"/{scenario}" if scenario else "")
                + _suggest(key, sorted(valid_keys)),
                line=lines_of.get(key), key=key,
            )
        conv, _default = schema.get(key, COMMON_KEYS.get(key, (str, None)))
        if key == "seed":
            conv = int
        elif key == "output_dir":
            conv = str
        try:
            parsed[key] = conv(value)
        except (ValueError, ConfigError) as exc:
            raise ConfigError(
                f"line {lines_of[key]}: bad value for {key!r}: {exc}",
                line=lines_of[key], key=key,
            ) from exc

    seed = parsed.pop("seed", 0)
    if seed < 0 or seed >= 2**64:
        raise ConfigError(f"seed must be a 64-bit unsigned integer, got {seed}",
                          key="seed")
    output_dir = parsed.pop("output_dir", ".")

    overrides = SCENARIO_DEFAULTS.get(scenario, {})
    params = {}
    for key, (conv, default) in schema.items():
        if key == "scenario":
            continue
        if key in parsed:
            params[key] = parsed[key]
        elif key in overrides:
            params[key] = overrides[key]
        elif default is None:
            if command == "simulate" and key == "amplitudes" and scenario == "lasing":
                params[key] = list(LASING_DEFAULT_AMPLITUDES)
            elif command == "simulate" and key not in SCENARIO_KEYS.get(scenario, ()):
                continue
            elif key == "amplitudes":
                continue
            else:
                raise ConfigError(f"missing required key {key!r} for {command}",
                                  key=key)
        else:
            params[key] = default

    cfg = RunConfig(command=command, params=params, seed=seed,
                    output_dir=output_dir, scenario=scenario)
    _validate_ranges(cfg)
    return cfg


def _validate_ranges(cfg):
    """Range-check parameters by dry-constructing the domain objects."""
    p = cfg.params
    try:
        if cfg.command == "temps":
            if p["regime"] not in ("weak_disorder", "strong_disorder",
                                   "quantum_strong_coupling", "quantum_weak_coupling"):
                raise ValidationError(f"unknown regime {p['regime']!r}")
            TransitionParams.from_kelvin(p["delta0_K"], p["m_eta2_N_K"], p["n_qubits"])
        elif cfg.command == "bands":
            PeriodicPotential(tuple(p["segments"]))
            if p["beta"] <= 0:
                raise ValidationError("beta must be > 0")
            if not (0 <= p["omega_min"] < p["omega_max"]):
                raise ValidationError("need 0 <= omega_min < omega_max")
            if p["n_omega"] < 2:
                raise ValidationError("n_omega must be >= 2")
        elif cfg.command == "scatter":
            QubitParams.from_splitting(p["qubit_omega"], p["d0"], p["qubit_epsilon"])
            if p["mutual_coupling"] < 0:
                raise ValidationError("mutual_coupling must be >= 0")
            if not (0 < p["omega_min"] <= p["omega_max"]):
                raise ValidationError("need 0 < omega_min <= omega_max")
            if p["drive_amplitude"] > 0.1 * p["qubit_omega"]:
                raise ValidationError("drive_amplitude above 0.1*qubit_omega")
            if p["launch_side"] not in ("left", "right"):
                raise ValidationError("launch_side must be left or right")
        elif cfg.command == "permittivity":
            QDParams(p["eps_b"], p["pop_factor"], p["osc_strength"], p["omega0"],
                     p["gamma"])
            if p["mode"] not in ("table", "stack"):
                raise ValidationError("mode must be table or stack")
            if not (0 <= p["omega_min"] < p["omega_max"]):
                raise ValidationError("need 0 <= omega_min < omega_max")
        elif cfg.command == "simulate":
            if cfg.scenario == "breathing":
                if not 0 < p["qubit_epsilon_frac"] < 1:
                    raise ValidationError("qubit_epsilon_frac must be in (0, 1)")
                if p["lambda_cells"] < 4:
                    raise ValidationError("lambda_cells must be >= 4")
            elif cfg.scenario == "priming":
                if p["n_sites"] < 8:
                    raise ValidationError("n_sites must be >= 8")
                if p["amplitude"] < 0:
                    raise ValidationError("amplitude must be >= 0")
                if p["n_cells"] and p["n_cells"] < p["n_sites"] + 300:
                    raise ValidationError(
                        "n_cells must leave >= 300 cells for pads and sponges")
            elif cfg.scenario == "lasing":
                if any(a < 0 for a in p["amplitudes"]):
                    raise ValidationError("amplitudes must be >= 0")
                if p["duration"] <= 0:
                    raise ValidationError("duration must be > 0")
                if p["n_cells"] and p["n_cells"] < 4 * p["n_qubits"]:
                    raise ValidationError("n_cells must be >= 4 * n_qubits")
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc


# ---------------------------------------------------------------------------
# CSV formatting


def format_sci9(x):
    """Scientific notation with a 10-digit mantissa and bare exponent,
    e.g. 0.5 -> 5.000000000e-1."""
    s = f"{float(x):.9e}"
    mant, exp = s.split("e")
    return f"{mant}e{int(exp)}"


def _render_cell(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    val = float(value)
    if not math.isfinite(val):
        raise InternalError(f"non-finite value {value!r} in output row")
    return format_sci9(val)


def write_table(rows, schema, path):
    """CSV with the exact header, sci9 numbers, LF endings, given row order."""
    schema = list(schema)
    out = [",".join(schema)]
    for row in rows:
        row = list(row)
        if len(row) != len(schema):
            raise InternalError(
                f"row width {len(row)} does not match schema {len(schema)}"
            )
        out.append(",".join(_render_cell(c) for c in row))
    data = "\n".join(out) + "\n"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(data)
    return path


# ---------------------------------------------------------------------------
# command runners (return (files, checks, not_detected_flag))


def _run_temps(cfg, outdir, jobs):
    p = cfg.params
    tp = TransitionParams.from_kelvin(p["delta0_K"], p["m_eta2_N_K"], p["n_qubits"])
    regime = p["regime"]
    if regime == "weak_disorder":
        t_star, valid = critical_temp_weak_disorder(tp)
    elif regime == "strong_disorder":
        t_star, valid = critical_temp_strong_disorder(tp)
    elif regime == "quantum_strong_coupling":
        t_star, valid = quantum_transition_temp(tp, "strong_coupling"), True
    else:
        t_star, valid = quantum_transition_temp(tp, "weak_coupling"), True
    rows = [(regime, t_star, valid)]
    f = write_table(rows, ("regime", "T_star_K", "valid"), outdir / "temps.csv")
    return [f], {"T_star_K": t_star}, False


def _run_bands(cfg, outdir, jobs):
    p = cfg.params
    pot = PeriodicPotential(tuple(p["segments"]))
    grid = np.linspace(p["omega_min"], p["omega_max"], p["n_omega"])
    bs = bloch_bands(pot, p["beta"], grid)
    rows = []
    for i in range(grid.size):
        k = None if bs.in_gap[i] else float(bs.bloch_k[i])
        rows.append((float(bs.omega[i]), float(bs.half_trace[i]), bool(bs.in_gap[i]), k))
    f1 = write_table(rows, ("omega", "half_trace", "in_gap", "bloch_k"),
                     outdir / "bands.csv")
    f2 = write_table([(lo, hi) for lo, hi in bs.gaps],
                     ("omega_low", "omega_high"), outdir / "gaps.csv")
    return [f1, f2], {"n_gaps": len(bs.gaps),
                      "gap_rows": int(np.sum(bs.in_gap))}, False


def _run_scatter(cfg, outdir, jobs):
    p = cfg.params
    qubit = QubitParams.from_splitting(p["qubit_omega"], p["d0"], p["qubit_epsilon"])
    grid = np.linspace(p["omega_min"], p["omega_max"], p["n_omega"])

    def one(omega):
        tab = run_scattering(qubit, p["mutual_coupling"], np.array([omega]),
                             p["drive_amplitude"], launch_side=p["launch_side"])
        return tab.r_complex[0], tab.t_complex[0]

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one, grid))
    else:
        results = [one(w) for w in grid]
    rows = []
    closure_max = 0.0
    for omega, (r, t) in zip(grid, results):
        closure = abs(r) ** 2 + abs(t) ** 2
        closure_max = max(closure_max, abs(closure - 1.0))
        rows.append((float(omega), r.real, r.imag, t.real, t.imag,
                     abs(r) ** 2, abs(t) ** 2))
    f = write_table(rows, ("omega", "r_re", "r_im", "t_re", "t_im", "r2", "t2"),
                    outdir / "scatter.csv")
    return [f], {"max_closure_residual": closure_max}, False


def _run_permittivity(cfg, outdir, jobs):
    p = cfg.params
    qd = QDParams(p["eps_b"], p["pop_factor"], p["osc_strength"], p["omega0"],
                  p["gamma"])
    grid = np.linspace(p["omega_min"], p["omega_max"], p["n_omega"])
    eps = qd_permittivity(qd, grid)
    rows = [(float(w), e.real, e.imag) for w, e in zip(grid, eps)]
    files = [write_table(rows, ("omega", "eps_re", "eps_im"),
                         outdir / "permittivity.csv")]
    checks = {}
    if p["mode"] == "stack":
        stack = bragg_qd_stack(qd, n_periods=p["n_periods"], eps_hi=p["eps_hi"])
        sp = layered_transmission(stack, grid, eps_b=1.0)
        rows = [(float(w), t2) for w, t2 in zip(grid, sp.t2)]
        files.append(write_table(rows, ("omega", "t2"), outdir / "transmission.csv"))
        i0 = int(np.argmin(np.abs(grid - p["omega0"])))
        checks["t2_at_omega0"] = float(sp.t2[i0])
    return files, checks, False


def _run_simulate(cfg, outdir, jobs):
    if cfg.scenario == "breathing":
        return _sim_breathing(cfg, outdir)
    if cfg.scenario == "priming":
        return _sim_priming(cfg, outdir)
    return _sim_lasing(cfg, outdir, jobs)


def _sim_breathing(cfg, outdir):
    p = cfg.params
    lam = p["lambda_cells"]
    eps_frac = p["qubit_epsilon_frac"]
    qubit = QubitParams(epsilon=eps_frac,
                        delta=math.sqrt(1.0 - eps_frac**2), omega=1.0, d0=0.0)
    xi = np.arange(lam)
    chi = p["chi0"] + p["chi1"] * np.cos(2.0 * np.pi * xi / lam)
    profile = SuperpositionProfile(np.cos(chi), np.sin(chi), 1.0)
    params = ModelParams.with_default_dt(p["beta"], 1.0, max(64, 4 * lam))
    res = run_breathing(profile, None, params,
                        duration=p["duration_periods"] * 2.0 * np.pi,
                        v0=p["v0"], v_offset=p["v_offset"], qubit=qubit,
                        samples_per_period=p["samples_per_period"])
    rows = []
    for i in range(res.times.size):
        lo = None if np.isnan(res.gap_low[i]) else float(res.gap_low[i])
        hi = None if np.isnan(res.gap_high[i]) else float(res.gap_high[i])
        rows.append((float(res.times[i]), lo, hi, float(res.width[i])))
    f = write_table(rows, ("time", "gap_low", "gap_high", "width"),
                    outdir / "breathing.csv")
    checks = {"modulation_omega": res.modulation_omega}
    return [f], checks, res.modulation_omega is None


def _sim_priming(cfg, outdir):
    p = cfg.params
    n_sites = p["n_sites"]
    n_cells = p["n_cells"] or (n_sites + 448)
    params = ModelParams(beta=p["beta"], dxi=1.0, dt=0.5 / p["beta"],
                         n_cells=n_cells, coupling_g=1.0)
    k0 = 2.0 * np.pi * p["k0_mode"] / n_sites
    omega_d = float(discrete_omega(k0, params))
    qubit = QubitParams.from_splitting(omega_d, p["d0"])
    start = (n_cells - n_sites) // 2
    chain = uniform_chain(n_sites, qubit, "ground",
                          site_positions=np.arange(start, start + n_sites))
    pl = PulseSpec(amplitude=p["amplitude"], carrier_k=k0,
                   envelope_width=p["envelope_width"], launch_side="left",
                   envelope="raised-cosine")
    amp_r = 0.0 if p["single_sided"] else p["amplitude"]
    pr = PulseSpec(amplitude=amp_r, carrier_k=k0,
                   envelope_width=p["envelope_width"], launch_side="right",
                   envelope="raised-cosine")
    res = run_priming(pl, pr, params, chain, exit_margin=p["exit_margin"])
    rows = [(int(s), float(pe)) for s, pe in zip(res.site_positions, res.p_excited)]
    f1 = write_table(rows, ("site", "p_excited"), outdir / "priming.csv")
    rows = [(float(k), float(m)) for k, m in zip(res.k_values, res.fourier_mag)]
    f2 = write_table(rows, ("k", "magnitude"), outdir / "priming_spectrum.csv")
    i_pk = int(np.argmin(np.abs(res.k_values - 2 * k0)))
    checks = {
        "residual_fraction": res.residual_fraction,
        "k0": k0,
        "peak_2k0": float(res.fourier_mag[i_pk]),
    }
    return [f1, f2], checks, False


def _sim_lasing(cfg, outdir, jobs):
    p = cfg.params
    n = p["n_cells"] or 256
    params = ModelParams(beta=p["beta"], dxi=1.0, dt=0.5 / p["beta"],
                         n_cells=n, coupling_g=1.0)
    qubit = QubitParams.from_splitting(1.0, p["d0"])
    n_q = p["n_qubits"]
    sites = np.arange(4, n, n // n_q)[:n_q]
    width = p["envelope_width"]

    def one(idx_amp):
        idx, amp = idx_amp
        if p["ground_control"]:
            chain = uniform_chain(n_q, qubit, "ground", site_positions=sites)
        else:
            chain = inverted_chain(n_q, qubit, cfg.seed, p["seed_amplitude"],
                                   site_positions=sites)
        trig = PulseSpec(amplitude=amp, carrier_k=1.0 / p["beta"],
                         envelope_width=width, envelope="gaussian")
        res = run_lasing(trig, params, chain, p["duration"], sample_every=1)
        return idx, res

    tasks = list(enumerate(p["amplitudes"]))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = sorted(pool.map(one, tasks), key=lambda r: r[0])
    else:
        results = [one(t) for t in tasks]

    rows = []
    any_not_detected = False
    products = []
    for idx, res in results:
        amp = p["amplitudes"][idx]
        tau = res.tau_onset
        prod = math.sqrt(amp) * tau if tau is not None else None
        if tau is None:
            any_not_detected = True
        else:
            products.append(prod)
        rows.append((amp, tau, res.detected, prod))
    f = write_table(rows, ("amplitude", "tau_onset", "detected", "sqrt_a_tau"),
                    outdir / "onset.csv")
    checks = {"products": products}
    return [f], checks, any_not_detected


RUNNERS = {
    "temps": _run_temps,
    "bands": _run_bands,
    "scatter": _run_scatter,
    "permittivity": _run_permittivity,
    "simulate": _run_simulate,
}


# ---------------------------------------------------------------------------
# manifest and execution


def _manifest_dict(cfg, started, finished=None, checks=None):
    return {
        "artifact_version": __version__,
        "command": cfg.command,
        "scenario": cfg.scenario,
        "config": {
            **{k: (list(v) if isinstance(v, (list, tuple)) else v)
               for k, v in cfg.params.items()},
            "seed": cfg.seed,
            "output_dir": cfg.output_dir,
        },
        "config_hash": cfg.content_hash(),
        "seed": cfg.seed,
        "started_utc": started,
        "finished_utc": finished,
        "checks": checks or {},
    }


def _write_manifest(path, payload):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2, default=float)
        fh.write("\n")


def execute(cfg, strict=False, jobs=1):
    """Run a validated config; returns the process exit code."""
    outdir = Path(cfg.output_dir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        probe = outdir / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        print(f"error: output_dir not writable: {exc}", file=sys.stderr)
        return 1

    started = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    manifest_path = outdir / "manifest.json"
    _write_manifest(manifest_path, _manifest_dict(cfg, started))

    try:
        files, checks, not_detected = RUNNERS[cfg.command](cfg, outdir, jobs)
    except (DivergenceError, ConvergenceError) as exc:
        finished = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
        _write_manifest(manifest_path,
                        _manifest_dict(cfg, started, finished,
                                       {"error": str(exc)}))
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except QmmError as exc:
        finished = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
        _write_manifest(manifest_path,
                        _manifest_dict(cfg, started, finished,
                                       {"error": str(exc)}))
        print(f"error: {exc}", file=sys.stderr)
        return 1

    finished = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    _write_manifest(manifest_path, _manifest_dict(cfg, started, finished, checks))
    for f in files:
        print(f"wrote {f}")
    if not_detected and strict:
        return 3
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="qmmsim",
        description="1D quantum-metamaterial simulations and analytics",
    )
    parser.add_argument("config", help="path to a key = value config file")
    parser.add_argument("--strict", action="store_true",
                        help="exit 3 when an onset/gap outcome is not detected")
    parser.add_argument("--jobs", type=int, default=1,
                        help="worker threads for sweeps")
    args = parser.parse_args(argv)

    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    try:
        cfg = parse_config(text)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return execute(cfg, strict=args.strict, jobs=max(1, args.jobs))


if __name__ == "__main__":
    sys.exit(main())
