"""``simulate`` entry point: run, verify and preset sub-commands."""

from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path
from typing import Sequence

from ..errors import ConfigError, PhysicsError, ToleranceError
from .config import ExperimentConfig, load_config, parse_config
from .runner import run, verify

EXIT_CONFIG = 2
EXIT_PHYSICS = 3
EXIT_TOLERANCE = 4
_STATUS = ((ConfigError, EXIT_CONFIG), (PhysicsError, EXIT_PHYSICS), (ToleranceError, EXIT_TOLERANCE))


def preset_names() -> list[str]:
    root = resources.files("pairhop.cli") / "presets"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".cfg"))


def load_preset(name: str) -> ExperimentConfig:
    if name not in preset_names():
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    text = (resources.files("pairhop.cli") / "presets" / f"{name}.cfg").read_text(encoding="utf-8")
    return parse_config(text, f"preset:{name}")


def _resolve(target: str) -> ExperimentConfig:
    """A config path, or the name of a bundled preset when no such file exists."""
    if not Path(target).exists() and target in preset_names():
        return load_preset(target)
    return load_config(target)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="simulate", description="Photon-pair hopping experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run the experiment described by a config file")
    p_run.add_argument("config")
    p_run.add_argument("--out", required=True, help="output directory")
    p_ver = sub.add_parser("verify", help="validate a config (file or preset name) without simulating")
    p_ver.add_argument("config")
    p_pre = sub.add_parser("preset", help="run a bundled preset")
    p_pre.add_argument("name", help="one of: " + ", ".join(preset_names()))
    p_pre.add_argument("--out", required=True, help="output directory")
    return parser


def _fail(exc: Exception, status: int) -> int:
    reason = " ".join(str(exc).split())
    print(f"error status={status} type={type(exc).__name__} reason={reason}", file=sys.stderr)
    return status


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            written = run(_resolve(args.config), args.out)
        elif args.command == "preset":
            written = run(load_preset(args.name), args.out, preset=f"preset:{args.name}")
        else:
            for line in verify(_resolve(args.config)):
                print(line)
            return 0
    except Exception as exc:
        for cls, status in _STATUS:
            if isinstance(exc, cls):
                return _fail(exc, status)
        return _fail(exc, 1)
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
