"""Experiment runner: configs, presets, and CSV/JSON emission.

A run is described by a flat, JSON-compatible config record. The runner
builds the model, samples the trajectory once, propagates the exact
reference plus every requested approximation tier, and writes one time
series file per tier plus a machine-readable summary. Outputs are
deterministic for a fixed config.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .config import DEFAULT, Tolerances
from .engines import (
    EvolutionReport,
    adiabatic_multipliers,
    band_weights,
    detect_transition,
    evolve_2x2,
    evolve_nxn,
    integrate_exact,
)
from .errors import RatioUndefinedError, SchurDynError, ValidationError
from .models import EpModelParams, avoided_crossing_model, ep_model, three_level_model
from .trajectory import HamiltonianModel, TrajectoryGrid, sample_trajectory

__all__ = ["ExperimentConfig", "run_experiment", "load_preset", "preset_names",
           "run_sweep", "CSV_COLUMNS"]

CSV_COLUMNS = [
    "s", "t",
    "re_lambda1", "im_lambda1", "re_lambda2", "im_lambda2",
    "x_eig1", "y_eig1", "x_eig2", "y_eig2",
    "x_state", "y_state",
    "abs_q_a", "abs_q_b",
    "abs_d11", "abs_d12", "abs_d21", "abs_d22",
    "weight_band1",
]

_ALLOWED_KEYS = {
    "name", "model", "c", "timescale", "cycles", "center_offset",
    "gap", "sweep", "drive", "h0", "v1", "v2", "dim",
    "steps", "tiers", "init", "order", "emit", "spectrum_grid",
}
_TIERS = {"exact", "leading", "subleading", "full"}
_INITS = {"decaying", "amplifying"}


@dataclass
class ExperimentConfig:
    """Validated flat experiment description."""

    raw: dict = field(default_factory=dict)

    def __post_init__(self):
        unknown = set(self.raw) - _ALLOWED_KEYS
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        self.name = str(self.raw.get("name", "run"))
        self.model_kind = self.raw.get("model", "ep2")
        self.steps = int(self.raw.get("steps", 4096))
        tiers = list(self.raw.get("tiers", ["exact", "subleading"]))
        bad = set(tiers) - _TIERS
        if bad:
            raise ValidationError(f"unknown tiers: {sorted(bad)}")
        if "exact" not in tiers:
            tiers = ["exact"] + tiers
        self.tiers = tiers
        self.init = self.raw.get("init", "decaying")
        if isinstance(self.init, str) and self.init not in _INITS:
            raise ValidationError(f"unknown init {self.init!r}")
        self.order = int(self.raw.get("order", DEFAULT.riccati_order))
        self.emit = self.raw.get("emit", "csv")
        if self.emit not in ("csv", "json"):
            raise ValidationError(f"unknown emit format {self.emit!r}")
        self.spectrum_grid = int(self.raw.get("spectrum_grid", 0))

    def build_model(self) -> HamiltonianModel:
        kind = self.model_kind
        if kind == "ep2":
            return ep_model(EpModelParams(
                c=float(self.raw.get("c", 2.0)),
                timescale=float(self.raw.get("timescale", 50.0)),
                cycles=int(self.raw.get("cycles", 1)),
                center_offset=_as_complex(self.raw["center_offset"])
                if "center_offset" in self.raw else None,
            ))
        if kind == "avoided_crossing":
            return avoided_crossing_model(
                gap=float(self.raw.get("gap", 1.0)),
                sweep=float(self.raw.get("sweep", 2.0)),
                timescale=float(self.raw.get("timescale", 50.0)),
            )
        if kind == "three_level":
            return three_level_model(
                drive=float(self.raw.get("drive", 0.15)),
                timescale=float(self.raw.get("timescale", 50.0)),
                cycles=int(self.raw.get("cycles", 1)),
            )
        if kind == "fourier":
            h0 = _as_matrix(self.raw["h0"])
            v1 = _as_matrix(self.raw.get("v1", np.zeros_like(h0)))
            v2 = _as_matrix(self.raw.get("v2", np.zeros_like(h0)))
            cycles = int(self.raw.get("cycles", 1))
            timescale = float(self.raw.get("timescale", 50.0))

            def eval_h(s):
                ang = 2.0 * np.pi * s * cycles
                return h0 + np.cos(ang) * v1 + np.sin(ang) * v2

            return HamiltonianModel(
                dim=h0.shape[0], eval=eval_h, timescale=timescale * cycles,
                descriptor={"model": "fourier", "cycles": cycles,
                            "timescale": timescale},
            )
        raise ValidationError(f"unknown model kind {kind!r}")

    def initial_state(self, grid: TrajectoryGrid) -> np.ndarray:
        if isinstance(self.init, str):
            if grid.dim != 2:
                raise ValidationError("named initial states need a two-level model")
            vec = grid.chi[0, :, 0] if self.init == "amplifying" else grid.xi[0, :, 0]
            return vec / np.linalg.norm(vec)
        vec = _as_vector(self.init)
        if len(vec) != grid.dim:
            raise ValidationError("custom initial state has the wrong dimension")
        return vec / np.linalg.norm(vec)


def _as_complex(v) -> complex:
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(v[0], v[1])
    return complex(v)


def _as_matrix(rows) -> np.ndarray:
    return np.array([[_as_complex(x) for x in row] for row in rows], dtype=complex)


def _as_vector(entries) -> np.ndarray:
    return np.array([_as_complex(x) for x in entries], dtype=complex)


def preset_names():
    base = resources.files("schurdyn").joinpath("presets")
    return sorted(p.name[:-5] for p in base.iterdir() if p.name.endswith(".json"))


def load_preset(name: str) -> ExperimentConfig:
    base = resources.files("schurdyn").joinpath("presets")
    path = base.joinpath(f"{name}.json")
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError:
        raise ValidationError(
            f"no preset {name!r}; available: {', '.join(preset_names())}"
        ) from None
    return ExperimentConfig(raw)


def _fmt(value) -> str:
    return "" if value is None else f"{value:.11e}"


def _tier_rows(cfg, grid, report, multipliers, weights):
    t_phys = grid.s * grid.timescale
    n = grid.dim
    two = n == 2
    rows = []
    for k in range(grid.n_points):
        z_state = None
        if two:
            psi = report.psi[k]
            if abs(psi[0]) > 1e-12 * np.linalg.norm(psi):
                z_state = psi[1] / psi[0]
        z1 = grid.chi[k, 1, 0] / grid.chi[k, 0, 0] if two else None
        z2 = grid.xi[k, 1, 0] / grid.xi[k, 0, 0] if two else None
        q_a = report.q_funcs.get("q_a") if two else None
        q_b = report.q_funcs.get("q_b") if two else None
        d = multipliers
        rows.append([
            _fmt(grid.s[k]), _fmt(t_phys[k]),
            _fmt(grid.lam[k, 0].real), _fmt(grid.lam[k, 0].imag),
            _fmt(grid.lam[k, 1].real), _fmt(grid.lam[k, 1].imag),
            _fmt(z1.real if z1 is not None else None),
            _fmt(z1.imag if z1 is not None else None),
            _fmt(z2.real if z2 is not None else None),
            _fmt(z2.imag if z2 is not None else None),
            _fmt(z_state.real if z_state is not None else None),
            _fmt(z_state.imag if z_state is not None else None),
            _fmt(abs(q_a[k]) if q_a is not None else None),
            _fmt(abs(q_b[k]) if q_b is not None else None),
            _fmt(abs(d[k, 0, 0]) if d is not None else None),
            _fmt(abs(d[k, 0, 1]) if d is not None else None),
            _fmt(abs(d[k, 1, 0]) if d is not None else None),
            _fmt(abs(d[k, 1, 1]) if d is not None else None),
            _fmt(weights[k, 0] if weights is not None else None),
        ])
    return rows


def _write_series(path: Path, rows, emit: str):
    if emit == "csv":
        lines = [",".join(CSV_COLUMNS)]
        lines += [",".join(r) for r in rows]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    else:
        records = [dict(zip(CSV_COLUMNS, r)) for r in rows]
        path.write_text(json.dumps(records, indent=1), encoding="utf-8")


def _q_references(grid: TrajectoryGrid, config: Tolerances):
    """q functions implied by exact component runs, via the evolution ansatz."""
    steps = grid.n_points - 1
    s_max = float(grid.s[-1])
    run_a = integrate_exact(grid.model, grid.chi[0, :, 0], s_max, steps, config)
    run_b = integrate_exact(grid.model, grid.eta[0, :, 0], s_max, steps, config)
    qa = -np.einsum("ki,ki->k", np.conj(grid.chi[:, :, 1]), run_a.psi) / np.einsum(
        "ki,ki->k", np.conj(grid.chi[:, :, 0]), run_a.psi
    )
    qb = -np.einsum("ki,ki->k", np.conj(grid.xi[:, :, 0]), run_b.psi) / np.einsum(
        "ki,ki->k", np.conj(grid.eta[:, :, 0]), run_b.psi
    )
    return qa, qb


def _fidelity(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    num = np.abs(np.einsum("ki,ki->k", np.conj(u), v)) ** 2
    den = (np.einsum("ki,ki->k", np.conj(u), u).real
           * np.einsum("ki,ki->k", np.conj(v), v).real)
    return num / np.maximum(den, 1e-300)


def run_experiment(cfg: ExperimentConfig, out_dir, config: Tolerances = DEFAULT):
    """Run every tier of one experiment and write its output files.

    Returns the summary dict (also written as ``<name>_summary.json``).
    Engine errors on individual tiers are recorded in the summary and do
    not abort the remaining tiers.
    """
    t_start = time.perf_counter()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    model = cfg.build_model()
    grid = sample_trajectory(model, 1.0, cfg.steps, config)
    psi0 = cfg.initial_state(grid)
    two = grid.dim == 2

    summary = {
        "config": cfg.raw,
        "tiers": {},
        "transitions": {},
        "files": [],
    }
    ext = "csv" if cfg.emit == "csv" else "json"

    exact_report = None
    q_refs = None
    reports: dict[str, EvolutionReport] = {}
    for tier in cfg.tiers:
        try:
            if tier == "exact":
                report = integrate_exact(model, psi0, 1.0, cfg.steps, config)
                exact_report = report
            elif two:
                report = evolve_2x2(grid, psi0, tier, order=cfg.order, config=config)
            else:
                report = evolve_nxn(grid, psi0, tier, order=cfg.order, config=config)
            reports[tier] = report
        except SchurDynError as exc:
            summary["tiers"][tier] = {"error": str(exc)}
            continue

    for tier, report in reports.items():
        info: dict = {"diagnostics": _jsonable(report.diagnostics)}
        multipliers = None
        weights = None
        if two:
            try:
                multipliers = (report.multipliers if report.multipliers is not None
                               else adiabatic_multipliers(report, grid, config))
            except SchurDynError as exc:
                info["multiplier_error"] = str(exc)
            weights = band_weights(report, grid)
            events = detect_transition(report, grid, config)
            summary["transitions"][tier] = [
                {"t": s_star * grid.timescale, "s": s_star, "from": a, "to": b}
                for (s_star, a, b) in events
            ]
            if tier != "exact":
                if q_refs is None:
                    q_refs = _q_references(grid, config)
                qa_ref, qb_ref = q_refs
                info["max_rel_err_abs_q_a"] = _max_rel_err(
                    report.q_funcs["q_a"], qa_ref)
                info["max_rel_err_abs_q_b"] = _max_rel_err(
                    report.q_funcs["q_b"], qb_ref)
        if tier != "exact" and exact_report is not None:
            fid = _fidelity(report.psi, exact_report.psi)
            skip = max(1, int(0.02 * grid.n_points))
            info["min_fidelity_after_2pct"] = float(fid[skip:].min())
            denom = max(float(np.abs(exact_report.psi[-1]).max()), 1e-300)
            info["final_state_rel_err"] = float(
                np.abs(report.psi[-1] - exact_report.psi[-1]).max() / denom
            )
        summary["tiers"][tier] = info
        path = out / f"{cfg.name}_{tier}.{ext}"
        _write_series(path, _tier_rows(cfg, grid, report, multipliers, weights), cfg.emit)
        summary["files"].append(path.name)

    if cfg.spectrum_grid > 0 and cfg.model_kind == "ep2":
        path = out / f"{cfg.name}_spectrum.csv"
        _write_spectrum(path, cfg)
        summary["files"].append(path.name)
        path = out / f"{cfg.name}_loop.csv"
        _write_loop(path, grid)
        summary["files"].append(path.name)

    summary["runtime_seconds"] = time.perf_counter() - t_start
    (out / f"{cfg.name}_summary.json").write_text(
        json.dumps(summary, indent=1, sort_keys=True), encoding="utf-8"
    )
    return summary


def _max_rel_err(q, q_ref) -> float:
    mag, ref = np.abs(q[1:]), np.abs(q_ref[1:])
    mask = ref > 0
    return float(np.max(np.abs(mag[mask] - ref[mask]) / ref[mask]))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return None  # bulky arrays stay out of summaries
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _write_spectrum(path: Path, cfg: ExperimentConfig):
    """Eigenvalue surfaces on a parameter-plane patch around the loop."""
    c = float(cfg.raw.get("c", 2.0))
    center = _as_complex(cfg.raw["center_offset"]) if "center_offset" in cfg.raw else -1j * c
    m = cfg.spectrum_grid
    omegas = center.real + np.linspace(-1.5, 1.5, m)
    nus = center.imag + np.linspace(-1.5, 1.5, m)
    lines = ["omega,nu,re_lambda1,im_lambda1,re_lambda2,im_lambda2"]
    for om in omegas:
        for nu in nus:
            lam = np.sqrt(complex(c**2 + (om + 1j * nu) ** 2))
            if lam.imag < 0:
                lam = -lam
            lines.append(
                ",".join(_fmt(v) for v in
                         (om, nu, lam.real, lam.imag, -lam.real, -lam.imag))
            )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_loop(path: Path, grid: TrajectoryGrid):
    """Drive-path samples in the spectrum-file schema (the overlay curve)."""
    lines = ["omega,nu,re_lambda1,im_lambda1,re_lambda2,im_lambda2"]
    for k in range(grid.n_points):
        h = grid.model.matrix(grid.s[k])
        w = h[0, 0]
        lines.append(",".join(_fmt(v) for v in (
            w.real, w.imag,
            grid.lam[k, 0].real, grid.lam[k, 0].imag,
            grid.lam[k, 1].real, grid.lam[k, 1].imag,
        )))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def run_sweep(base: ExperimentConfig, param: str, values, out_dir,
              config: Tolerances = DEFAULT):
    """Run one experiment per parameter value, in parallel; summarize errors."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    def member(value):
        raw = dict(base.raw)
        raw[param] = value
        raw["name"] = f"{base.name}_{param}{value:g}"
        return run_experiment(ExperimentConfig(raw), out, config)

    with ThreadPoolExecutor(max_workers=min(4, max(1, len(values)))) as pool:
        summaries = list(pool.map(member, values))

    entries = []
    for value, summ in zip(values, summaries):
        entry = {"value": value}
        for tier, info in summ["tiers"].items():
            if "max_rel_err_abs_q_a" in info:
                entry[f"{tier}_max_rel_err_abs_q_a"] = info["max_rel_err_abs_q_a"]
                entry[f"{tier}_max_rel_err_abs_q_b"] = info["max_rel_err_abs_q_b"]
        entries.append(entry)
    sweep_summary = {"param": param, "values": list(values), "members": entries}
    (out / f"{base.name}_sweep_summary.json").write_text(
        json.dumps(sweep_summary, indent=1, sort_keys=True), encoding="utf-8"
    )
    return sweep_summary
