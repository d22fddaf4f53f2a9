"""Command-line front end.

    lv4 simulate  --preset fig1a --generations 5000 --out runs/a
    lv4 classify  --config my.json
    lv4 diagram   --preset fig4a --resolution 200 --out runs/4a
    lv4 normalize --config my.json
    lv4 presets

Exit codes: 0 ok, 2 config error, 3 blow-up, 4 normalization error.
Every failure prints one JSON object on a single stderr line.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from . import emit, lvmap, stability
from .lvmap import EcoParams
from .scenarios import UnknownPresetError, get_preset, list_presets

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BLOWUP = 3
EXIT_NORMALIZE = 4

CONFIG_KEYS = {
    "preset", "params", "init", "generations", "extinction_threshold",
    "resolution", "out", "workers", "plot",
}


class ConfigError(ValueError):
    pass


class CommandFailed(Exception):
    def __init__(self, code: int, kind: str, message: str):
        super().__init__(message)
        self.code = code
        self.kind = kind


@dataclass(frozen=True)
class RunConfig:
    eco: EcoParams
    preset: str | None = None
    init: tuple | None = None
    generations: int = 1000
    extinction_threshold: float = lvmap.DEFAULT_EXTINCTION_THRESHOLD
    resolution: int = stability.DEFAULT_RESOLUTION
    out: Path = Path(".")
    workers: int = 1
    plot: bool = True


def _int(value, name, minimum):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{name} must be an integer")
    if value < minimum:
        raise ConfigError(f"{name} must be >= {minimum}")
    return value


def build_config(raw: dict) -> RunConfig:
    """Validate a merged config mapping (file contents plus CLI overrides)."""
    unknown = set(raw) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    preset_name = raw.get("preset")
    params = raw.get("params")
    if preset_name is not None and params is not None:
        raise ConfigError("'preset' and 'params' are mutually exclusive")
    if preset_name is None and params is None:
        raise ConfigError("config needs either 'preset' or 'params'")

    init = None
    if preset_name is not None:
        try:
            preset = get_preset(preset_name)
        except UnknownPresetError as exc:
            raise ConfigError(exc.args[0]) from None
        eco, init = preset.eco, preset.init
    else:
        if not isinstance(params, dict):
            raise ConfigError("'params' must be an object")
        try:
            eco = EcoParams.from_dict(params)
        except (lvmap.InvalidParametersError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid params: {exc}") from None

    if raw.get("init") is not None:
        values = raw["init"]
        if not isinstance(values, list) or len(values) != 4:
            raise ConfigError("init must be a list of 4 numbers")
        try:
            init = tuple(float(v) for v in values)
        except (TypeError, ValueError):
            raise ConfigError("init must be a list of 4 numbers") from None
        if not all(math.isfinite(v) and v >= 0 for v in init):
            raise ConfigError("init populations must be finite and >= 0")

    kwargs = {}
    if raw.get("generations") is not None:
        kwargs["generations"] = _int(raw["generations"], "generations", 0)
    if raw.get("resolution") is not None:
        kwargs["resolution"] = _int(raw["resolution"], "resolution", 2)
    if raw.get("workers") is not None:
        kwargs["workers"] = _int(raw["workers"], "workers", 1)
    if raw.get("extinction_threshold") is not None:
        thr = raw["extinction_threshold"]
        if isinstance(thr, bool) or not isinstance(thr, (int, float)) or not thr > 0:
            raise ConfigError("extinction_threshold must be a positive number")
        kwargs["extinction_threshold"] = float(thr)
    if raw.get("out") is not None:
        kwargs["out"] = Path(raw["out"])
    if raw.get("plot") is not None:
        kwargs["plot"] = bool(raw["plot"])
    return RunConfig(eco=eco, preset=preset_name, init=init, **kwargs)


def load_config(args) -> RunConfig:
    raw = {}
    if args.config is not None:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
    if args.preset is not None:
        raw["preset"] = args.preset
    for key in ("generations", "resolution", "out", "workers"):
        value = getattr(args, key, None)
        if value is not None:
            raw[key] = value
    if getattr(args, "no_plot", False):
        raw["plot"] = False
    return build_config(raw)


def _state_dict(values):
    return dict(zip(lvmap.SPECIES, (float(v) for v in values)))


def cmd_simulate(cfg: RunConfig) -> int:
    if cfg.init is None:
        raise ConfigError("simulate needs 'init' (or a preset with an initial state)")
    traj = lvmap.simulate(lvmap.compile(cfg.eco), cfg.init, cfg.generations)
    report = lvmap.persistence(traj, cfg.extinction_threshold)
    summary = {
        "preset": cfg.preset,
        "params": cfg.eco.to_dict(),
        "init": _state_dict(cfg.init),
        "generations_requested": cfg.generations,
        "generations_completed": traj.generations,
        "final": _state_dict(traj.final),
        "persistence": report.to_dict(),
        "events": [e.to_dict() for e in traj.events],
    }
    emit.atomic_write(cfg.out / "trajectory.csv", emit.trajectory_csv(traj))
    emit.write_json(cfg.out / "summary.json", summary)
    if cfg.plot:
        from .plotting import plot_trajectory

        plot_trajectory(traj, cfg.out / "trajectory.png", title=cfg.preset)
    print(f"wrote {cfg.out / 'trajectory.csv'} ({traj.generations + 1} rows)")
    if traj.blew_up:
        raise CommandFailed(EXIT_BLOWUP, "blowup", f"populations diverged at generation {report.blowup_generation}")
    return EXIT_OK


def classification_report(c: stability.Classification) -> dict:
    eig = []
    if c.eigen is not None:
        eig = [{"re": float(z.real), "im": float(z.imag), "modulus": float(abs(z))} for z in c.eigen.eigenvalues]
    return {
        "class": c.kind.label,
        "fixed_point": c.fixed_point.to_dict(),
        "eigenvalues": eig,
        "spectral_radius": c.spectral_radius,
        "warning": c.warning,
    }


def cmd_classify(cfg: RunConfig) -> int:
    coeffs = lvmap.compile(cfg.eco)
    report = {"preset": cfg.preset, "params": cfg.eco.to_dict()}
    report.update(classification_report(stability.classify(coeffs)))
    text = emit.dumps(report)
    emit.atomic_write(cfg.out / "classify.json", text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_diagram(cfg: RunConfig) -> int:
    grid = stability.diagram(cfg.eco, cfg.resolution, workers=cfg.workers)
    emit.atomic_write(cfg.out / "grid.csv", emit.grid_csv(grid))
    emit.atomic_write(cfg.out / "diagram.ppm", emit.ppm_bytes(emit.heatmap_pixels(grid)))
    if cfg.plot:
        from .plotting import plot_diagram

        plot_diagram(grid, cfg.out / "diagram.png", title=cfg.preset)
    counts = {kind.label: grid.count(kind) for kind in stability.Stability}
    print(" ".join(f"{k}={v}" for k, v in counts.items()))
    return EXIT_OK


def cmd_normalize(cfg: RunConfig) -> int:
    try:
        norm = lvmap.normalize(cfg.eco)
    except lvmap.ZeroRowError as exc:
        raise CommandFailed(EXIT_NORMALIZE, "normalize", str(exc)) from None
    before = lvmap.compile(cfg.eco)
    after = lvmap.compile(norm)
    report = {
        "preset": cfg.preset,
        "params": cfg.eco.to_dict(),
        "normalized": norm.to_dict(),
        "invariance": {
            "before": {"B": before.B, "C": before.C},
            "after": {"B": after.B, "C": after.C},
            "identical": before == after,
        },
    }
    text = emit.dumps(report)
    emit.atomic_write(cfg.out / "normalize.json", text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_presets() -> int:
    for name, description in list_presets():
        print(f"{name}\t{description}")
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "classify": cmd_classify,
    "diagram": cmd_diagram,
    "normalize": cmd_normalize,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--preset", help="named parameter set (see 'presets')")
    common.add_argument("--generations", type=int)
    common.add_argument("--resolution", type=int)
    common.add_argument("--out", help="output directory (default: current directory)")
    common.add_argument("--workers", type=int, help="threads for diagram sweeps")
    common.add_argument("--no-plot", action="store_true", help="skip matplotlib figures")

    parser = _Parser(prog="lv4", description="Four-species discrete-time Lotka-Volterra toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("simulate", parents=[common], help="iterate the map and write a trajectory")
    sub.add_parser("classify", parents=[common], help="fixed point, eigenvalues and stability")
    sub.add_parser("diagram", parents=[common], help="stability diagram over hunting efficiencies")
    sub.add_parser("normalize", parents=[common], help="normalize hunting efficiencies")
    sub.add_parser("presets", help="list named parameter sets")
    return parser


def _fail(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return code


def main(argv=None) -> int:
    try:
        args = make_parser().parse_args(argv)
        if args.command == "presets":
            return cmd_presets()
        cfg = load_config(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        return _fail("config", str(exc), EXIT_CONFIG)
    except CommandFailed as exc:
        return _fail(exc.kind, str(exc), exc.code)


if __name__ == "__main__":
    sys.exit(main())
