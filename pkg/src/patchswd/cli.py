"""Command-line entry point: ``patchswd <task> [flags]``.

Configuration is resolved as task preset < ``--config`` file < explicit flags.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields, replace
from pathlib import Path

import numpy as np

from . import bench, synthesis
from .imaging import ImageDecodeError, load_image, save_image
from .metrics import distance_report
from .swd import ImageTooSmallError
from .synthesis import FrequencyMask, InitMode, SynthesisConfig

# CLI / config-file name -> SynthesisConfig field
PARAMS = {
    "pyramid_factor": "pyramid_factor",
    "coarse_dim": "coarse_dim",
    "scale_factors": "scale_factors",
    "init_mode": "init_mode",
    "noise_sigma": "noise_sigma",
    "patch_size": "patch_size",
    "stride": "stride",
    "num_projections": "num_projections",
    "learning_rate": "learning_rate",
    "num_optimization_steps": "num_steps",
    "seed": "seed",
}

TASKS = ("reshuffle", "retarget", "style", "texture", "edit")

EXIT_USAGE = 2
EXIT_IO = 3
EXIT_TOO_SMALL = 4
EXIT_FAILURE = 1


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


def parse_scale_factors(text: str) -> tuple[float, float]:
    parts = [p.strip() for p in str(text).strip("()").split(",")]
    if len(parts) != 2:
        raise ValueError(f"scale factors must be 'h,w', got {text!r}")
    return float(parts[0]), float(parts[1])


def _convert(name: str, value: str):
    field = PARAMS[name]
    if field == "scale_factors":
        return parse_scale_factors(value)
    if field == "init_mode":
        return InitMode(value.replace("content_image", "provided_image"))
    if field in ("pyramid_factor", "noise_sigma", "learning_rate"):
        return float(value)
    return int(value)


def read_config_file(path) -> dict:
    """Parse ``key=value`` lines; ``#`` starts a comment."""
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read config file {path}: {exc.strerror or exc}", EXIT_IO) from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in PARAMS:
            raise CliError(f"{path}:{lineno}: unknown parameter {key!r}")
        try:
            values[key] = _convert(key, value)
        except ValueError as exc:
            raise CliError(f"{path}:{lineno}: invalid value for {key}: {exc}") from exc
    return values


def _add_synthesis_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key=value file overriding the task preset")
    p.add_argument("--output", required=True, help="output directory")
    p.add_argument("--num-outputs", type=int, default=1, help="variants with seeds seed..seed+N-1")
    p.add_argument("--pyramid-factor", type=float)
    p.add_argument("--coarse-dim", type=int)
    p.add_argument("--scale-factors", type=parse_scale_factors, metavar="H,W")
    p.add_argument("--init-mode", choices=[m.value for m in InitMode])
    p.add_argument("--noise-sigma", type=float)
    p.add_argument("--patch-size", type=int)
    p.add_argument("--stride", type=int)
    p.add_argument("--num-projections", type=int)
    p.add_argument("--learning-rate", type=float)
    p.add_argument("--num-optimization-steps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--mask", help="grayscale PNG; pixels >= 0.5 mark patches to boost")
    p.add_argument("--boost-factor", type=int, default=2)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="patchswd",
                                     description="Image synthesis by patch sliced-Wasserstein matching.")
    sub = parser.add_subparsers(dest="command", required=True)

    for task in ("reshuffle", "retarget", "texture"):
        p = sub.add_parser(task)
        p.add_argument("--input", required=True, help="target image")
        _add_synthesis_flags(p)
    p = sub.add_parser("style")
    p.add_argument("--content", required=True)
    p.add_argument("--style", required=True)
    _add_synthesis_flags(p)
    p = sub.add_parser("edit")
    p.add_argument("--input", required=True, help="crudely edited image")
    p.add_argument("--target", required=True, help="original image")
    _add_synthesis_flags(p)

    p = sub.add_parser("metrics")
    p.add_argument("--a", required=True, help="generated image")
    p.add_argument("--b", required=True, help="reference image")
    p.add_argument("--patch-size", type=int, default=7)
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("text", "record"), default="text")
    p.add_argument("--output", help="also write the report to this file")

    p = sub.add_parser("bench")
    p.add_argument("--patch-counts", default="1000,3000,10000,30000,100000",
                   help="comma-separated target patch counts M")
    p.add_argument("--methods", default="swd,exact_nn")
    p.add_argument("--patch-size", type=int, default=7)
    p.add_argument("--num-projections", type=int, default=64)
    p.add_argument("--repeats", type=int, default=bench.MIN_REPEATS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--memory-cap-gb", type=float, default=bench.DEFAULT_MEMORY_CAP / 2 ** 30)
    p.add_argument("--parallel", action="store_true", help="do not pin BLAS to one thread")
    p.add_argument("--threads", type=int, help="thread count in parallel mode")
    p.add_argument("--output", help="also write the CSV to this file")
    return parser


def resolve_config(task: str, args) -> tuple[SynthesisConfig, set]:
    cfg = synthesis.PRESETS[task]
    overrides = {}
    if args.config:
        overrides.update(read_config_file(args.config))
    for name in PARAMS:
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    return replace(cfg, **{PARAMS[k]: v for k, v in overrides.items()}), set(overrides)


def format_config(cfg: SynthesisConfig) -> str:
    lines = []
    inverse = {v: k for k, v in PARAMS.items()}
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if isinstance(value, InitMode):
            value = value.value
        elif f.name == "scale_factors":
            value = f"{value[0]:g},{value[1]:g}"
        lines.append(f"{inverse[f.name]}={value}")
    return "\n".join(lines)


def _load(path) -> np.ndarray:
    if not Path(path).is_file():
        raise CliError(f"input file not found: {path}", EXIT_IO)
    try:
        return load_image(path)
    except ImageDecodeError as exc:
        raise CliError(str(exc), EXIT_IO) from exc


def _load_mask(path, boost: int):
    img = _load(path)
    return FrequencyMask(img.mean(axis=2) >= 0.0, boost)


def _run_task(task: str, args) -> int:
    cfg, explicit = resolve_config(task, args)
    if args.num_outputs < 1:
        raise CliError(f"--num-outputs must be positive, got {args.num_outputs}")
    out_dir = Path(args.output)

    content = None
    if task == "style":
        target = _load(args.style)
        content = _load(args.content)
        stem = Path(args.content).stem
        if "coarse_dim" not in explicit:
            cfg = synthesis.single_level(cfg, target.shape)
    elif task == "edit":
        target = _load(args.target)
        content = _load(args.input)
        stem = Path(args.input).stem
        if content.shape != target.shape:
            raise CliError(f"edited image {content.shape[:2]} and target {target.shape[:2]} differ in size")
    else:
        target = _load(args.input)
        stem = Path(args.input).stem
    mask = _load_mask(args.mask, args.boost_factor) if args.mask else None

    print(f"# task={task}")
    print(format_config(cfg))
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create output directory {out_dir}: {exc.strerror}", EXIT_IO) from exc

    for i in range(args.num_outputs):
        run_cfg = replace(cfg, seed=cfg.seed + i)
        result = synthesis.synthesize(target, run_cfg, mask=mask, init=content)
        path = out_dir / f"{stem}_{task}_seed{run_cfg.seed}.png"
        try:
            save_image(result, path)
        except OSError as exc:
            raise CliError(str(exc), EXIT_IO) from exc
        print(f"seed={run_cfg.seed} output={path}")
    return 0


def _write_side_output(path, text: str):
    try:
        Path(path).write_text(text + "\n")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}", EXIT_IO) from exc


def _run_metrics(args) -> int:
    a = _load(args.a)
    b = _load(args.b)
    report = distance_report(b, a, args.patch_size, args.stride, args.seed)
    text = report.to_text() if args.format == "text" else report.to_record()
    print(f"# seed={args.seed}")
    print(text)
    if args.output:
        _write_side_output(args.output, text)
    return 0


def _run_bench(args) -> int:
    try:
        counts = [int(c) for c in args.patch_counts.split(",") if c.strip()]
    except ValueError as exc:
        raise CliError(f"invalid --patch-counts: {args.patch_counts!r}") from exc
    methods = [m.strip() for m in args.methods.split(",")]
    unknown = set(methods) - {"swd", "exact_nn"}
    if unknown:
        raise CliError(f"unknown bench method(s): {', '.join(sorted(unknown))}")
    dims = [bench.dims_for_patch_count(m, args.patch_size) for m in counts]
    cap = int(args.memory_cap_gb * 2 ** 30)
    records = []
    print(f"# seed={args.seed} parallel={args.parallel}")
    print(bench.CSV_HEADER)
    for method in methods:
        if method == "swd":
            recs = bench.bench_swd_iter(dims, args.patch_size, args.num_projections, args.seed,
                                        args.repeats, parallel=args.parallel, threads=args.threads)
        else:
            recs = bench.bench_nn_iter(dims, args.patch_size, args.seed, args.repeats,
                                       memory_cap=cap, parallel=args.parallel, threads=args.threads)
        for r in recs:
            print(r.to_csv(), flush=True)
        records.extend(recs)
    if records:
        print(f"# threads={records[0].threads}")
    if args.output:
        _write_side_output(args.output, "\n".join([bench.CSV_HEADER] + [r.to_csv() for r in records]))
    return 0


def run(argv=None) -> int:
    """Parse ``argv`` and execute the chosen subcommand; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command in TASKS:
            return _run_task(args.command, args)
        if args.command == "metrics":
            return _run_metrics(args)
        return _run_bench(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ImageTooSmallError as exc:
        print(f"error: image too small: {exc}", file=sys.stderr)
        return EXIT_TOO_SMALL
    except bench.MemoryCapExceeded as exc:
        print(f"error: refusing benchmark size: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except ValueError as exc:
        print(f"error: invalid parameter: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
