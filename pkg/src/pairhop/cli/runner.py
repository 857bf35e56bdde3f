"""Experiment execution and dry-run validation for the command line."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .. import __version__
from ..errors import ConfigError, PhysicsError, ResonanceError, ToleranceError
from ..fock import Operator, fock_state
from ..model import (
    MIN_CUTOFFS,
    MODE_LABELS,
    SystemParams,
    build_effective_hamiltonian,
    build_full_hamiltonian,
    hop_matrix_element,
    jump_channels,
)
from ..dynamics import (
    EvolutionSpec,
    default_pulse_end,
    lindblad_evolve,
    mcwf_ensemble,
    mcwf_trajectory,
    projected_two_level,
    pulse_experiment,
)
from ..dynamics.lindblad import MAX_DIM
from ..dynamics.mcwf import MAX_JUMP_PROBABILITY
from ..spectra import find_avoided_crossing, scan_levels
from .config import ExperimentConfig
from .io import write_csv, write_manifest

_TRAJ_HEADER = ("t", "exp_na", "exp_nb", "exp_nc", "norm")
_FULL_ONLY = ("spectrum", "crossing", "pulse")


@dataclass
class Plan:
    """Validated parameters plus the report lines shared by ``verify`` and ``run``."""

    config: ExperimentConfig
    params: SystemParams
    report: list[tuple[str, str]] = field(default_factory=list)

    def add(self, key: str, value) -> None:
        self.report.append((key, str(value)))


def time_grid(t_max: float, dt: float) -> np.ndarray:
    """Uniform grid from 0 to exactly ``t_max`` with spacing at most ``dt``."""
    n = max(1, math.ceil(t_max / dt - 1e-9))
    return np.linspace(0.0, t_max, n + 1)


def plan(config: ExperimentConfig) -> Plan:
    """Check every physics precondition without simulating anything.

    Raises:
        ConfigError: If a value is inconsistent with the chosen model size.
        PhysicsError: On instability, missing resonance or undersized cutoffs.
        ToleranceError: If a loss rate is too large for the jump-time resolution.
    """
    params = config.system()
    p = Plan(config, params)
    kind = config.kind
    p.add("kind", kind)
    p.add("stability", f"ok (g*omega_a = {params.g * params.omega_a:.6g} < omega_c^2 = {params.omega_c**2:.6g})")
    p.add("resonant", "yes" if params.is_resonant else "no")
    p.add("ratio", f"{params.ratio:.12g}")

    for label, n, lo in zip(MODE_LABELS, params.cutoffs, MIN_CUTOFFS):
        if n < lo:
            raise PhysicsError(f"cutoff_{label} = {n} below the minimum {lo}")
    dim = params.space.dim
    p.add("cutoffs", f"{','.join(map(str, params.cutoffs))} (dim {dim})")

    hamiltonian = config["run.hamiltonian"]
    if kind in _FULL_ONLY and hamiltonian != "full":
        raise ConfigError(f"run.hamiltonian must be full for kind={kind}")
    if kind == "analytic" or hamiltonian != "full":
        if not params.is_resonant:
            raise ResonanceError("resonance required: omega_a != omega_c")
    if kind in ("trajectory", "ensemble", "analytic"):
        p.add("hamiltonian", hamiltonian if kind != "analytic" else "two-state reference")

    if kind in ("spectrum",) and config["run.n_levels"] > dim:
        raise ConfigError(f"run.n_levels = {config['run.n_levels']} exceeds the dimension {dim}")

    if kind in ("trajectory", "ensemble"):
        initial = config["run.initial"]
        for label, n, cut in zip(MODE_LABELS, initial, params.cutoffs):
            if n >= cut:
                raise ConfigError(f"initial occupation n_{label} = {n} does not fit cutoff_{label} = {cut}")
        dt = config.dt_jump()
        dp = max(params.gammas) * sum(initial) * dt
        if dp >= MAX_JUMP_PROBABILITY:
            raise ToleranceError(
                f"estimated max dp = {dp:.3g} >= {MAX_JUMP_PROBABILITY}; use run.dt_jump < "
                f"{dt * MAX_JUMP_PROBABILITY / dp:.3g}"
            )
        p.add("initial", ",".join(map(str, initial)))
        p.add("dt_jump", f"{dt:.6g}")
        p.add("max_dp_estimate", f"{dp:.3g} (gamma_max * excitations * dt_jump)")
        p.add("dp_bound", f"ok (< {MAX_JUMP_PROBABILITY})")
    if kind == "ensemble":
        if dim <= MAX_DIM:
            p.add("lindblad_oracle", f"oracle feasible at reduced cutoffs (dim {dim} <= {MAX_DIM})")
        else:
            p.add("lindblad_oracle", f"oracle not feasible at these cutoffs (dim {dim} > {MAX_DIM})")
    if kind == "pulse":
        if any(params.gammas):
            raise PhysicsError("the pulse experiment is closed: all loss rates must vanish")
        pulse = config.pulse(params)
        p.add("pulse", f"A={pulse.amplitude:g} t0={pulse.center:g} tau={pulse.width:g} omega_d={pulse.carrier:g}")
        p.add("t_max", f"{pulse_t_max(config, params):.6g}")
    if kind in ("spectrum", "crossing"):
        lo, hi = config.bracket()
        if not 0 < lo < hi:
            raise ConfigError(f"ratio range must satisfy 0 < ratio_lo < ratio_hi, got [{lo}, {hi}]")
        # the top of the range must remain stable
        config.system().with_ratio(hi)
        p.add("ratio_range", f"[{lo:g}, {hi:g}]")
    p.add("seed", config.seed)
    return p


def pulse_t_max(config: ExperimentConfig, params: SystemParams) -> float:
    if config["run.t_max"] is not None:
        return config["run.t_max"]
    return default_pulse_end(params, config.pulse(params))


def _hamiltonian(config: ExperimentConfig, params: SystemParams) -> Operator:
    choice = config["run.hamiltonian"]
    if choice == "full":
        return build_full_hamiltonian(params)
    return build_effective_hamiltonian(params, form="james" if choice == "effective" else "printed")


def _trajectory_spec(config: ExperimentConfig, params: SystemParams, seed: int) -> EvolutionSpec:
    dt_out = config["run.dt_out"] or config.dt_jump()
    return EvolutionSpec(
        generator=_hamiltonian(config, params),
        times=time_grid(config["run.t_max"], dt_out),
        initial=fock_state(params.space, config["run.initial"]),
        jump_channels=jump_channels(params),
        seed=seed,
        max_step=config.dt_jump(),
    )


Files = dict[str, tuple[tuple[str, ...], list]]


def _run_trajectory(config: ExperimentConfig, params: SystemParams) -> Files:
    tr = mcwf_trajectory(_trajectory_spec(config, params, config.seed))
    rows = [(t, *e, n) for t, e, n in zip(tr.times, tr.expectations, tr.norms)]
    jumps = [(t, MODE_LABELS[m]) for t, m in tr.jump_events]
    return {"trajectory.csv": (_TRAJ_HEADER, rows), "jumps.csv": (("t", "channel"), jumps)}


def _run_ensemble(config: ExperimentConfig, params: SystemParams) -> Files:
    spec = _trajectory_spec(config, params, config.seed)
    ens = mcwf_ensemble(spec, config["run.n_traj"], master_seed=config.seed)
    header = ("t", "mean_na", "se_na", "mean_nb", "se_nb", "mean_nc", "se_nc")
    rows = [
        (t, m[0], s[0], m[1], s[1], m[2], s[2])
        for t, m, s in zip(ens.times, ens.mean, ens.se)
    ]
    files: Files = {"ensemble.csv": (header, rows)}
    if params.space.dim <= MAX_DIM:
        ref = lindblad_evolve(spec.generator, spec.jump_channels, spec.initial, spec.times)
        occ = ref.number_expectations()
        files["lindblad.csv"] = (
            ("t", "rho_na", "rho_nb", "rho_nc"),
            [(t, *row) for t, row in zip(ref.times, occ)],
        )
    return files


def _run_spectrum(config: ExperimentConfig, params: SystemParams) -> Files:
    scan = scan_levels(params, config.bracket(), config["run.n_points"], config["run.n_levels"])
    header = ("ratio", *(f"E{k}" for k in range(scan.n_levels)), "gap_tracked")
    rows = [(r, *levels, gap) for r, levels, gap in zip(scan.grid, scan.levels, scan.gap)]
    return {"spectrum.csv": (header, rows)}


def _run_crossing(config: ExperimentConfig, params: SystemParams) -> Files:
    rep = find_avoided_crossing(params, config.bracket())
    w = rep.hybrid_weights
    rows = [
        ("location", rep.location),
        ("gap", rep.gap),
        ("predicted_gap", 2.0 * abs(hop_matrix_element(params.with_ratio(rep.location)))),
        ("energy_lower", rep.energies[0]),
        ("energy_upper", rep.energies[1]),
        ("weight_lower_200", w[0, 0]),
        ("weight_lower_002", w[0, 1]),
        ("weight_upper_200", w[1, 0]),
        ("weight_upper_002", w[1, 1]),
        ("evaluations", rep.evaluations),
    ]
    return {"crossing.csv": (("quantity", "value"), rows)}


def _run_pulse(config: ExperimentConfig, params: SystemParams) -> Files:
    t_max = pulse_t_max(config, params)
    dt_out = config["run.dt_out"] or t_max / 400.0
    res = pulse_experiment(params, config.pulse(params), time_grid(t_max, dt_out), config["pulse.form"])
    pops = [
        (label, n, float(p))
        for label in MODE_LABELS
        for n, p in enumerate(res.populations(label))
    ]
    tr = res.trajectory
    rows = [
        (t, *e, n, par)
        for t, e, n, par in zip(tr.times, tr.expectations, tr.norms, tr.extra["parity_c"])
    ]
    return {
        "pulse.csv": (("mode", "n", "population"), pops),
        "pulse_trajectory.csv": ((*_TRAJ_HEADER, "parity_c"), rows),
    }


def _run_analytic(config: ExperimentConfig, params: SystemParams) -> Files:
    times = time_grid(config["run.t_max"], config["run.dt_out"] or config.dt_jump())
    gt = projected_two_level(params, times, convention="g_tilde")
    me = projected_two_level(params, times, convention="matrix_element")
    header = ("t", "exp_na_gt", "exp_nc_gt", "exp_na_2gt", "exp_nc_2gt", "exp_nb", "survival")
    rows = [
        (t, *vals)
        for t, *vals in zip(times, gt.exp_na, gt.exp_nc, me.exp_na, me.exp_nc, gt.exp_nb, gt.survival)
    ]
    return {"analytic.csv": (header, rows)}


RUNNERS: dict[str, Callable[[ExperimentConfig, SystemParams], Files]] = {
    "trajectory": _run_trajectory,
    "ensemble": _run_ensemble,
    "spectrum": _run_spectrum,
    "crossing": _run_crossing,
    "pulse": _run_pulse,
    "analytic": _run_analytic,
}


def verify(config: ExperimentConfig) -> list[str]:
    """Dry-run report lines; raises like :func:`run` but never simulates."""
    p = plan(config)
    return ["status = ok", f"source = {config.source}", *(f"{k} = {v}" for k, v in p.report)]


def run(config: ExperimentConfig, out_dir: str | Path, preset: str | None = None) -> list[Path]:
    """Execute the experiment and write its CSVs and manifest into ``out_dir``.

    Nothing is written unless the computation succeeds.
    """
    p = plan(config)
    files = RUNNERS[config.kind](config, p.params)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, (header, rows) in files.items():
        path = out / name
        write_csv(path, header, rows)
        written.append(path)
    entries = [
        f"version = {__version__}",
        f"source = {preset or config.source}",
        f"seed = {config.seed}",
        f"cutoffs = {','.join(map(str, config.cutoffs))}",
        *config.resolved_lines(),
        *(f"check.{k} = {v}" for k, v in p.report),
        f"files = {','.join(sorted(files))}",
    ]
    manifest = out / "manifest"
    write_manifest(manifest, entries)
    written.append(manifest)
    return written
