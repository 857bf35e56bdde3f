"""Line-oriented experiment configuration: ``section.key = value`` with ``#`` comments."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

from ..errors import ConfigError
from ..model import PulseParams, SystemParams

KINDS = ("spectrum", "crossing", "trajectory", "ensemble", "pulse", "analytic")
HAMILTONIANS = ("full", "effective", "effective_printed")
_REQUIRED = object()


def _number(text: str) -> float:
    """Decimal, exponent or fraction (``4/3``) literal."""
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a number: {text!r}") from exc


def _integer(text: str) -> int:
    value = _number(text)
    if value != int(value):
        raise ValueError(f"not an integer: {text!r}")
    return int(value)


def _occupations(text: str) -> tuple[int, int, int]:
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if len(parts) != 3:
        raise ValueError(f"need three occupations n_a,n_b,n_c, got {text!r}")
    occ = tuple(_integer(p) for p in parts)
    if any(n < 0 for n in occ):
        raise ValueError(f"occupations must be non-negative, got {text!r}")
    return occ


def _choice(*options: str) -> Callable[[str], str]:
    def parse(text: str) -> str:
        value = text.strip()
        if value not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {value!r}")
        return value

    return parse


def _text(text: str) -> str:
    return text.strip()


# key -> (parser, default); defaults of None are filled in from other values
SCHEMA: dict[str, tuple[Callable[[str], Any], Any]] = {
    "system.omega_a": (_number, _REQUIRED),
    "system.omega_b": (_number, _REQUIRED),
    "system.omega_c": (_number, _REQUIRED),
    "system.g": (_number, _REQUIRED),
    "system.gamma_a": (_number, 0.0),
    "system.gamma_b": (_number, 0.0),
    "system.gamma_c": (_number, 0.0),
    "system.cutoff_a": (_integer, 7),
    "system.cutoff_b": (_integer, 5),
    "system.cutoff_c": (_integer, 7),
    "run.kind": (_choice(*KINDS), _REQUIRED),
    "run.t_max": (_number, None),
    "run.dt_jump": (_number, None),
    "run.dt_out": (_number, None),
    "run.n_traj": (_integer, None),
    "run.seed": (_integer, 0),
    "run.initial": (_occupations, (2, 0, 0)),
    "run.ratio_lo": (_number, None),
    "run.ratio_hi": (_number, None),
    "run.n_points": (_integer, 201),
    "run.n_levels": (_integer, 12),
    "run.hamiltonian": (_choice(*HAMILTONIANS), "full"),
    "run.note": (_text, ""),
    "pulse.amplitude": (_number, None),
    "pulse.center": (_number, None),
    "pulse.width": (_number, None),
    "pulse.carrier": (_number, None),
    "pulse.form": (_choice("rotating", "real"), "rotating"),
}

KIND_REQUIRED = {
    "spectrum": (),
    "crossing": (),
    "trajectory": ("run.t_max",),
    "ensemble": ("run.t_max", "run.n_traj"),
    "pulse": (),
    "analytic": ("run.t_max",),
}

DEFAULT_BRACKETS = {"spectrum": (0.95, 1.05), "crossing": (0.99, 1.01)}


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved configuration: every schema key has a concrete value."""

    values: dict[str, Any]
    source: str = "<string>"
    explicit: frozenset[str] = field(default_factory=frozenset)

    def __getitem__(self, key: str) -> Any:
        return self.values[key]

    @property
    def kind(self) -> str:
        return self.values["run.kind"]

    @property
    def seed(self) -> int:
        return self.values["run.seed"]

    @property
    def cutoffs(self) -> tuple[int, int, int]:
        v = self.values
        return (v["system.cutoff_a"], v["system.cutoff_b"], v["system.cutoff_c"])

    def system(self) -> SystemParams:
        """Physical parameters; raises ``PhysicsError`` on instability."""
        v = self.values
        return SystemParams(
            omega_a=v["system.omega_a"],
            omega_b=v["system.omega_b"],
            omega_c=v["system.omega_c"],
            g=v["system.g"],
            gamma_a=v["system.gamma_a"],
            gamma_b=v["system.gamma_b"],
            gamma_c=v["system.gamma_c"],
            cutoffs=self.cutoffs,
        )

    def pulse(self, params: SystemParams) -> PulseParams:
        overrides = {
            name: self.values[f"pulse.{name}"]
            for name in ("amplitude", "center", "width", "carrier")
            if self.values[f"pulse.{name}"] is not None
        }
        return PulseParams.defaults_for(params, **overrides)

    def bracket(self) -> tuple[float, float]:
        lo, hi = DEFAULT_BRACKETS.get(self.kind, (0.95, 1.05))
        v = self.values
        lo = lo if v["run.ratio_lo"] is None else v["run.ratio_lo"]
        hi = hi if v["run.ratio_hi"] is None else v["run.ratio_hi"]
        return (lo, hi)

    def dt_jump(self) -> float:
        v = self.values
        return v["run.dt_jump"] if v["run.dt_jump"] is not None else 1.0 / v["system.omega_b"]

    def resolved_lines(self) -> list[str]:
        """``key = value`` lines for every key, defaults included."""
        out = []
        for key in SCHEMA:
            value = self.values[key]
            if value is None:
                text = "auto"
            elif isinstance(value, tuple):
                text = ",".join(str(x) for x in value)
            elif isinstance(value, float):
                text = repr(value)
            else:
                text = str(value)
            out.append(f"{key} = {text}")
        return out


def parse_config(text: str, source: str = "<string>") -> ExperimentConfig:
    """Parse and validate a configuration.

    Raises:
        ConfigError: On syntax errors, unknown or repeated keys, unparsable
            values, or keys the selected run kind requires but lacks.
    """
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"{source}:{lineno}: expected 'section.key = value'")
        key, value = (s.strip() for s in body.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"{source}:{lineno}: unknown key {key}")
        if key in raw:
            raise ConfigError(f"{source}:{lineno}: repeated key {key}")
        if not value:
            raise ConfigError(f"{source}:{lineno}: empty value for {key}")
        raw[key] = value

    values: dict[str, Any] = {}
    for key, (parser, default) in SCHEMA.items():
        if key in raw:
            try:
                values[key] = parser(raw[key])
            except ValueError as exc:
                raise ConfigError(f"{source}: bad value for {key}: {exc}") from None
        elif default is _REQUIRED:
            raise ConfigError(f"{source}: missing required key {key}")
        else:
            values[key] = default

    kind = values["run.kind"]
    for key in KIND_REQUIRED[kind]:
        if key not in raw:
            raise ConfigError(f"{source}: missing required key {key} for kind={kind}")
    _check_ranges(values, source)
    return ExperimentConfig(values, source, frozenset(raw))


def _check_ranges(v: dict[str, Any], source: str) -> None:
    def need(cond: bool, key: str, what: str) -> None:
        if not cond:
            raise ConfigError(f"{source}: {key} {what}, got {v[key]}")

    for key in ("run.t_max", "run.dt_jump", "run.dt_out"):
        if v[key] is not None:
            need(v[key] > 0, key, "must be positive")
    if v["run.n_traj"] is not None:
        need(v["run.n_traj"] >= 1, "run.n_traj", "must be at least 1")
    need(v["run.n_points"] >= 2, "run.n_points", "must be at least 2")
    need(v["run.n_levels"] >= 1, "run.n_levels", "must be at least 1")
    need(v["run.seed"] >= 0, "run.seed", "must be non-negative")
    for key in ("system.cutoff_a", "system.cutoff_b", "system.cutoff_c"):
        need(v[key] >= 1, key, "must be at least 1")


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, str(path))
