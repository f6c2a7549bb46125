"""Command-line front end: ``python -m app.cli <subcommand> [flags]``.

Diagnostics go to standard error through logging. Data goes to a fresh
timestamped directory under OUTPUT_ROOT (or ``--out``), or to standard
output as JSON with ``--stdout``. Exit codes: 0 success, 2 bad input,
3 numerical failure, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Callable, NoReturn, Optional, Sequence, Union

from pydantic import BaseModel, ValidationError

from app.config import DEFAULT_DEGREE, LOG_LEVEL
from app.errors import InputError, InvalidGroup, ToolkitError, exit_code_for
from app.experiments.gap import run_gap_experiment, write_gap_outputs
from app.experiments.hs_decay import run_hs_decay, write_hs_outputs
from app.experiments.jensen import jensen_audit
from app.experiments.presets import get_preset_config
from app.experiments.runner import output_dir, write_csv
from app.experiments.scaling import run_partition_scaling, write_scaling_outputs
from app.geometry.schottky import group_from_dict, load_group, reference_group, validate
from app.models import (
    CliConfig,
    Disk,
    ExperimentScale,
    GapExperimentConfig,
    HsDecayConfig,
    PermutationRep,
    Rectangle,
    RepKind,
    ScalingConfig,
    SchottkyData,
    TraceMode,
)
from app.permutations.permrep import is_transitive, read_rep, sample_rep, write_rep
from app.permutations.traces import bsp_bound, expected_trace
from app.spectral.contour import locate_zeros
from app.spectral.euler import calibrate_convention, euler_product_zeta
from app.spectral.representations import RepProvider, make_rep
from app.spectral.transfer import (
    TransferGeometry,
    TransferOperator,
    hs_norm_factored,
    hs_norm_kernel,
    hs_norm_matrix,
    write_matrix_dump,
)
from app.spectral.zeta import ZetaFunction, ZetaKind, hausdorff_dimension, pressure, pressure_operator
from app.words.constants import estimate_constants
from app.words.intervals import mirror_partition, partition, upsilon

logger = logging.getLogger("app.cli")

EXIT_USAGE = 64

Payload = Union[dict, BaseModel]


class ToolkitParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with 64 instead of 2.

    Exit code 2 is reserved for rejected input values.
    """

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ── Output ───────────────────────────────────────────────────────────────────

def _as_json(payload: Payload) -> dict:
    return payload.model_dump(mode="json") if isinstance(payload, BaseModel) else payload


def emit(args: argparse.Namespace, payload: Payload,
         write: Optional[Callable[[Path], list[Path]]] = None) -> None:
    """Print ``payload`` on stdout, or persist it (and any extra files) to the output directory."""
    if args.stdout:
        json.dump(_as_json(payload), sys.stdout, indent=2)
        sys.stdout.write("\n")
        return
    out = output_dir(args.out, args.command)
    if write is not None:
        paths = write(out)
    else:
        path = out / f"{args.command.replace('-', '_')}.json"
        path.write_text(json.dumps(_as_json(payload), indent=2), encoding="utf-8")
        paths = [path]
    for path in paths:
        logger.info("Wrote %s", path)


# ── Shared argument handling ─────────────────────────────────────────────────

def _seed(args: argparse.Namespace) -> int:
    return args.seed if args.seed is not None else 0


def _degree(args: argparse.Namespace) -> int:
    return args.degree or DEFAULT_DEGREE


def cli_config(args: argparse.Namespace) -> CliConfig:
    """Validated parameter set; raises pydantic ValidationError on bad values."""
    tau = getattr(args, "tau", None)
    return CliConfig(
        subcommand=args.command,
        group_file=args.group,
        taylor_degree=_degree(args),
        tau=tau if not isinstance(tau, list) else None,
        taus=tau if isinstance(tau, list) else [],
        s_re=getattr(args, "s_re", None),
        s_im=getattr(args, "s_im", 0.0) or 0.0,
        sigma0_fraction=getattr(args, "sigma0_fraction", None),
        height=getattr(args, "height", None) or 1.0,
        n=getattr(args, "n", None),
        degrees=getattr(args, "degrees", None) or [],
        trials=getattr(args, "trials", None),
        tol=getattr(args, "tol", None) or 1e-10,
        seed=_seed(args),
        out=args.out,
        stdout=args.stdout,
        strict=args.strict,
        jobs=args.jobs,
    )


def _permutation(args: argparse.Namespace, g: SchottkyData) -> Optional[PermutationRep]:
    if RepKind(args.rep) == RepKind.TRIVIAL:
        return None
    if args.rep_file:
        perm = read_rep(args.rep_file)
    elif args.n:
        perm = sample_rep(args.n, g.r, _seed(args))
    else:
        raise InputError(f"--rep {args.rep} needs --n or --rep-file")
    if perm.r != g.r:
        raise InputError(f"cover has {perm.r} generator images, group has r={g.r}")
    return perm


def _rep(args: argparse.Namespace, perm: Optional[PermutationRep]) -> RepProvider:
    return make_rep(RepKind(args.rep), perm)


def _kind(args: argparse.Namespace, g: SchottkyData) -> ZetaKind:
    if args.kind == "refined":
        if args.tau is None:
            raise InputError("--kind refined needs --tau")
        return ZetaKind.refined(args.tau, g)
    return ZetaKind.standard()


def _complex_s(args: argparse.Namespace) -> complex:
    return complex(args.s_re, args.s_im)


# ── Subcommands ──────────────────────────────────────────────────────────────

def cmd_validate(args: argparse.Namespace) -> None:
    try:
        if args.group:
            g = group_from_dict(json.loads(Path(args.group).read_text(encoding="utf-8")))
        else:
            g = reference_group()
    except InvalidGroup as exc:
        if exc.report is not None:
            emit(args, exc.report)
        raise
    emit(args, validate(g))


def cmd_dimension(args: argparse.Namespace) -> None:
    g = load_group(args.group)
    result = hausdorff_dimension(g, tol=args.tol, degree=_degree(args))
    emit(args, {
        "delta": result.delta,
        "bracket": list(result.bracket),
        "pressure_at_delta": result.pressure_at_delta,
        "iterations": result.iterations,
        "degree": _degree(args),
    })


def cmd_pressure(args: argparse.Namespace) -> None:
    g = load_group(args.group)
    operator = pressure_operator(g, _degree(args))
    points = [{"sigma": sigma, "pressure": pressure(sigma, g, operator=operator)}
              for sigma in args.sigma]
    emit(args, {"degree": _degree(args), "points": points})


def cmd_zeta_eval(args: argparse.Namespace) -> None:
    g = load_group(args.group)
    perm = _permutation(args, g)
    kind = _kind(args, g)
    s = _complex_s(args)
    zeta = ZetaFunction(kind, g, _rep(args, perm), _degree(args), strict=args.strict)
    payload: dict = {"kind": kind.label, "rep": args.rep, "degree": _degree(args),
                     "s": [s.real, s.imag]}
    if args.log_derivative:
        value, logd = zeta.value_and_log_derivative(s)
        payload["log_derivative"] = [logd.real, logd.imag]
    else:
        value = zeta.value(s)
    payload.update({"re": value.real, "im": value.imag, "abs": abs(value)})

    if args.euler or args.calibrate:
        delta = hausdorff_dimension(g, degree=_degree(args)).delta
        if args.euler:
            euler = euler_product_zeta(s, g, args.max_word_len, rep=perm,
                                       rep_kind=RepKind(args.rep), delta=delta)
            payload["euler"] = {"re": euler.real, "im": euler.imag, "abs": abs(euler),
                                "max_word_len": args.max_word_len}
        if args.calibrate:
            calibration = calibrate_convention(g, _degree(args), delta, args.max_word_len)
            payload["calibration"] = {**asdict(calibration), "mismatch": calibration.mismatch,
                                      "convention": calibration.convention.value}
            for key in ("s", "determinant", "classes_value", "pairs_value"):
                z = complex(payload["calibration"][key])
                payload["calibration"][key] = [z.real, z.imag]
    payload["warnings"] = zeta.warnings
    emit(args, payload)


def _region(args: argparse.Namespace, g: SchottkyData) -> Union[Rectangle, Disk]:
    if args.rect:
        re_min, re_max, im_min, im_max = args.rect
        return Rectangle(re_min=re_min, re_max=re_max, im_min=im_min, im_max=im_max)
    if args.disk:
        re, im, radius = args.disk
        return Disk(center_re=re, center_im=im, radius=radius)
    delta = hausdorff_dimension(g, degree=_degree(args)).delta
    fraction = args.sigma0_fraction or 0.8
    return Rectangle(re_min=fraction * delta, re_max=delta + 0.1,
                     im_min=-args.height, im_max=args.height)


def cmd_resonances(args: argparse.Namespace) -> None:
    g = load_group(args.group)
    perm = _permutation(args, g)
    zeta = ZetaFunction(_kind(args, g), g, _rep(args, perm), _degree(args), strict=args.strict)
    report = locate_zeros(zeta, _region(args, g), tol=args.tol, nodes=args.nodes)
    emit(args, {**report.model_dump(mode="json"), "warnings": zeta.warnings})


def cmd_partition(args: argparse.Namespace) -> None:
    g = load_group(args.group)
    words = (mirror_partition if args.mirror else partition)(args.tau, g, args.max_depth)
    rows = [{"word": " ".join(map(str, w)), "length": len(w), "upsilon": upsilon(w, g)}
            for w in words]
    payload = {"tau": args.tau, "mirror": args.mirror, "count": len(words),
               "words": [{"word": list(w), "upsilon": row["upsilon"]} for w, row in zip(words, rows)]}

    def write(out: Path) -> list[Path]:
        summary = out / "partition.json"
        summary.write_text(json.dumps(payload, indent=2), encoding="utf-8")
        return [write_csv(out / "partition.csv", rows, ["word", "length", "upsilon"]), summary]

    emit(args, payload, write)


def cmd_power_pairs(args: argparse.Namespace) -> None:
    g = load_group(args.group)
    config = ScalingConfig(group_file=args.group, taus=args.tau, cap=args.cap,
                           epsilon=args.epsilon, degree=_degree(args))
    record = run_partition_scaling(config, g=g)
    emit(args, record, lambda out: write_scaling_outputs(record, out))


def cmd_trace_stats(args: argparse.Namespace) -> None:
    g = load_group(args.group)
    word = tuple(args.word)
    estimate = expected_trace(word, args.n, g.r, TraceMode(args.mode), args.trials, _seed(args))
    emit(args, {"word": list(word), "n": args.n, "r": g.r,
                "estimate": estimate.model_dump(mode="json"),
                "bsp_bound": bsp_bound(word, args.n, g.r)})


def cmd_hs_norm(args: argparse.Namespace) -> None:
    g = load_group(args.group)
    perm = _permutation(args, g)
    rep = _rep(args, perm)
    s = _complex_s(args)
    geometry = TransferGeometry(g, mirror_partition(args.tau, g), _degree(args),
                                label=f"Zbar({args.tau:g})", strict=args.strict)
    operator = TransferOperator(geometry, rep)
    T = operator.matrix(s)
    warnings = list(T.warnings)
    payload: dict = {"tau": args.tau, "s": [s.real, s.imag], "rep": args.rep,
                     "words": len(geometry.words), "size": T.size,
                     "hs_matrix": hs_norm_matrix(T)}
    if args.method in ("factored", "all"):
        payload["hs_factored"] = hs_norm_factored(operator, s)
    if args.method in ("kernel", "all"):
        payload["hs_kernel"] = hs_norm_kernel(g, args.tau, s, rep, strict=args.strict,
                                              warnings=warnings)
    payload["warnings"] = warnings

    def write(out: Path) -> list[Path]:
        summary = out / "hs_norm.json"
        summary.write_text(json.dumps(payload, indent=2), encoding="utf-8")
        paths = [summary]
        if args.dump:
            write_matrix_dump(T, out / "transfer_matrix.bin")
            paths.append(out / "transfer_matrix.bin")
        return paths

    emit(args, payload, write)


def cmd_cover_sample(args: argparse.Namespace) -> None:
    r = args.r or load_group(args.group).r
    rep = sample_rep(args.n, r, _seed(args))
    payload = {**rep.dump(), "r": r, "transitive": is_transitive(rep)}

    def write(out: Path) -> list[Path]:
        write_rep(rep, out / "cover.json")
        return [out / "cover.json"]

    emit(args, payload, write)


def _merged(preset: Optional[str], config_file: Optional[str], defaults: dict,
            overrides: dict) -> dict:
    """Preset sizes, then the config file, then explicit flags."""
    merged = dict(defaults) if preset else {}
    if config_file:
        merged.update(json.loads(Path(config_file).read_text(encoding="utf-8")))
    merged.update({k: v for k, v in overrides.items() if v is not None})
    return merged


def cmd_gap_experiment(args: argparse.Namespace) -> None:
    preset = get_preset_config(ExperimentScale(args.preset)) if args.preset else None
    defaults = {} if preset is None else {
        "taylor_degree": preset.taylor_degree, "degrees": preset.gap_degrees,
        "trials": preset.gap_trials, "contour_nodes": preset.contour_nodes,
    }
    config = GapExperimentConfig(**_merged(args.preset, args.config, defaults, {
        "group_file": args.group, "degrees": args.degrees, "trials": args.trials,
        "sigma0_fraction": args.sigma0_fraction, "height": args.height,
        "taylor_degree": args.degree, "base_seed": args.seed, "contour_nodes": args.nodes,
        "audit_trials": args.audit_trials, "identity_debug": args.identity_debug or None,
        "strict": args.strict or None, "jobs": args.jobs,
    }))
    record = run_gap_experiment(config)
    if args.stdout:
        emit(args, {"config_hash": record.config_hash, "delta": record.delta,
                    "summaries": [s.model_dump(mode="json") for s in record.summaries],
                    "trend_ok": record.trend_ok, "warnings": record.warnings})
    else:
        emit(args, record, lambda out: write_gap_outputs(record, out))


def cmd_hs_decay(args: argparse.Namespace) -> None:
    preset = get_preset_config(ExperimentScale(args.preset)) if args.preset else None
    defaults = {} if preset is None else {
        "taylor_degree": preset.taylor_degree, "degrees": preset.hs_degrees,
        "trials": preset.hs_trials,
    }
    config = HsDecayConfig(**_merged(args.preset, args.config, defaults, {
        "group_file": args.group, "degrees": args.degrees, "trials": args.trials,
        "sigma_fractions": args.sigma_fractions, "t_values": args.t_values,
        "taylor_degree": args.degree, "base_seed": args.seed,
        "strict": args.strict or None, "jobs": args.jobs,
    }))
    record = run_hs_decay(config)
    emit(args, record, lambda out: write_hs_outputs(record, out))


def cmd_jensen_audit(args: argparse.Namespace) -> None:
    g = load_group(args.group)
    perm = _permutation(args, g)
    disk = None
    if args.disk:
        re, im, radius = args.disk
        disk = Disk(center_re=re, center_im=im, radius=radius)
    audit = jensen_audit(_rep(args, perm), g, _kind(args, g), disk, _degree(args),
                         sigma0_fraction=args.sigma0_fraction or 0.8, height=args.height,
                         contour_nodes=args.nodes, strict=args.strict)
    emit(args, audit)


def cmd_constants(args: argparse.Namespace) -> None:
    g = load_group(args.group)
    delta = hausdorff_dimension(g, degree=_degree(args)).delta
    constants = estimate_constants(args.depth, g, delta)
    emit(args, {"delta": delta, "constants": constants.model_dump(mode="json"),
                "report": constants.report()})


COMMANDS: dict[str, Callable[[argparse.Namespace], None]] = {
    "validate": cmd_validate,
    "dimension": cmd_dimension,
    "pressure": cmd_pressure,
    "zeta-eval": cmd_zeta_eval,
    "resonances": cmd_resonances,
    "partition": cmd_partition,
    "power-pairs": cmd_power_pairs,
    "trace-stats": cmd_trace_stats,
    "hs-norm": cmd_hs_norm,
    "cover-sample": cmd_cover_sample,
    "gap-experiment": cmd_gap_experiment,
    "hs-decay": cmd_hs_decay,
    "jensen-audit": cmd_jensen_audit,
    "constants": cmd_constants,
}


# ── Parser ───────────────────────────────────────────────────────────────────

def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", help="group JSON file (default: reference group)")
    common.add_argument("--degree", "-M", type=int, help="Taylor degree M per disk")
    common.add_argument("--seed", type=int, help="seed for every random draw (default 0)")
    common.add_argument("--out", help="output directory (default: timestamped under runs/)")
    common.add_argument("--stdout", action="store_true", help="print JSON to stdout instead of writing files")
    common.add_argument("--strict", action="store_true", help="treat truncation warnings as failures")
    common.add_argument("--jobs", type=int, help="worker processes for experiments")
    return common


def _rep_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rep", choices=[k.value for k in RepKind], default=RepKind.TRIVIAL.value)
    p.add_argument("--n", type=int, help="cover degree for std/std0 (sampled with --seed)")
    p.add_argument("--rep-file", help="cover JSON written by cover-sample")


def _kind_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kind", choices=["standard", "refined"], default="standard")
    p.add_argument("--tau", type=float, help="partition scale for --kind refined")


def build_parser() -> ToolkitParser:
    parser = ToolkitParser(
        prog="schottky",
        description="Transfer operators, zeta functions and random covers of Schottky surfaces",
        epilog="Example: schottky dimension --tol 1e-8 --stdout",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="subcommand")
    common = _common()

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], help=help_text, description=help_text)

    add("validate", "check the group invariants")

    p = add("dimension", "Hausdorff dimension delta of the limit set")
    p.add_argument("--tol", type=float, default=1e-10)

    p = add("pressure", "topological pressure P(sigma)")
    p.add_argument("--sigma", type=float, nargs="+", required=True)

    p = add("zeta-eval", "evaluate a zeta function at one point")
    _kind_args(p)
    _rep_args(p)
    p.add_argument("--s-re", type=float, required=True)
    p.add_argument("--s-im", type=float, default=0.0)
    p.add_argument("--log-derivative", action="store_true")
    p.add_argument("--euler", action="store_true", help="also evaluate the truncated Euler product")
    p.add_argument("--calibrate", action="store_true", help="compare geodesic conventions")
    p.add_argument("--max-word-len", type=int, default=10)

    p = add("resonances", "locate zeros in a rectangle or disk")
    _kind_args(p)
    _rep_args(p)
    p.add_argument("--rect", type=float, nargs=4, metavar=("RE_MIN", "RE_MAX", "IM_MIN", "IM_MAX"))
    p.add_argument("--disk", type=float, nargs=3, metavar=("RE", "IM", "RADIUS"))
    p.add_argument("--sigma0-fraction", type=float)
    p.add_argument("--height", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--nodes", type=int)

    p = add("partition", "words of Z(tau) or its mirror with their interval lengths")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--mirror", action="store_true")
    p.add_argument("--max-depth", type=int)

    p = add("power-pairs", "classify pairs of the mirrored partition for one or more tau")
    p.add_argument("--tau", type=float, nargs="+", required=True)
    p.add_argument("--cap", type=int)
    p.add_argument("--epsilon", type=float, default=0.3)

    p = add("trace-stats", "expected std0 character of a word under random covers")
    p.add_argument("--word", type=int, nargs="+", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--mode", choices=[m.value for m in TraceMode], default=TraceMode.MONTE_CARLO.value)

    p = add("hs-norm", "Hilbert-Schmidt norm of the refined transfer operator")
    _rep_args(p)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--s-re", type=float, required=True)
    p.add_argument("--s-im", type=float, default=0.0)
    p.add_argument("--method", choices=["matrix", "factored", "kernel", "all"], default="matrix")
    p.add_argument("--dump", action="store_true", help="also write the binary matrix dump")

    p = add("cover-sample", "sample a random degree-n cover")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, help="number of generators (default: from the group)")

    for name, help_text in (("gap-experiment", "fraction of covers with new zeros"),
                            ("hs-decay", "decay of the mean HS norm in the cover degree")):
        p = add(name, help_text)
        p.add_argument("--config", help="experiment JSON config")
        p.add_argument("--preset", choices=[s.value for s in ExperimentScale])
        p.add_argument("--degrees", type=int, nargs="+")
        p.add_argument("--trials", type=int)
    gap = sub.choices["gap-experiment"]
    gap.add_argument("--sigma0-fraction", type=float)
    gap.add_argument("--height", type=float)
    gap.add_argument("--nodes", type=int)
    gap.add_argument("--audit-trials", type=int)
    gap.add_argument("--identity-debug", action="store_true")
    decay = sub.choices["hs-decay"]
    decay.add_argument("--sigma-fractions", type=float, nargs="+")
    decay.add_argument("--t-values", type=float, nargs="+")

    p = add("jensen-audit", "check Jensen's formula on a disk")
    _kind_args(p)
    _rep_args(p)
    p.add_argument("--disk", type=float, nargs=3, metavar=("RE", "IM", "RADIUS"))
    p.add_argument("--sigma0-fraction", type=float)
    p.add_argument("--height", type=float, default=1.0)
    p.add_argument("--nodes", type=int)

    p = add("constants", "empirical distortion and derivative constants")
    p.add_argument("--depth", type=int, default=8)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    logging.basicConfig(level=LOG_LEVEL, stream=sys.stderr,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        cli_config(args)
        COMMANDS[args.command](args)
    except ToolkitError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return exit_code_for(exc)
    except ValidationError as exc:
        logger.error("Invalid parameters: %s", exc)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        logger.error("Cannot read input: %s", exc)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
