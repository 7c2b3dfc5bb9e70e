"""Command-line interface: ``holoequiv {gen,convert,verify,report}``.

Every flag in the common group can also be set through an environment variable
``HOLOEQUIV_<FLAG>`` (for example ``HOLOEQUIV_SEED=7``); an explicit flag wins.
A path of ``-`` reads from stdin or writes to stdout.

Exit codes: 0 pass, 1 a checked bound was violated, 2 usage or schema error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from ._validation import EXHAUSTIVE_LIMIT, LimitExceededError, all_inputs, check_bits
from .activations import CLIP
from .functions import CoordinateMeasure, Junta, Parity, WeightedAverage
from .holographic import (
    HoloScheme,
    MeanTest,
    averaged_test,
    build_mean_scheme,
    build_junta_scheme,
    constant_scheme,
    holo_check,
    identicalize,
)
from .network import Network, audit_complexity, compile_poly_to_nn, compiled_bounds
from .polynomial import PolyRep, holo_to_poly, poly_complexity
from .sampling import SamplerPlan, describe_int, nn_to_holo, plan_network, run_plan
from .serialization import SchemaError, load, save, to_envelope
from .verification import PipelineConfig, lemma_suite, run_pipeline, sup_norm_error

ENV_PREFIX = "HOLOEQUIV_"
EXIT_PASS, EXIT_VIOLATED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class Config:
    seed: int = 0
    eps: float = 0.2
    trials: int = 10_000
    limit: int = EXHAUSTIVE_LIMIT
    search: str = "exhaustive"

    def __post_init__(self):
        if self.limit < 1 or self.trials < 1:
            raise UsageError("limits and trial counts must be positive")
        if not 0 < self.eps < 1:
            raise UsageError("--eps must lie in (0, 1)")
        if self.search not in ("exhaustive", "alternating"):
            raise UsageError("--search must be exhaustive or alternating")


def _env_default(name: str, cast, fallback):
    raw = os.environ.get(ENV_PREFIX + name.upper())
    if raw is None:
        return fallback
    try:
        return cast(raw)
    except ValueError as exc:
        raise UsageError(f"invalid {ENV_PREFIX}{name.upper()}={raw!r}") from exc


def _common_parser() -> argparse.ArgumentParser:
    base = Config()
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--seed", type=int, default=_env_default("seed", int, base.seed))
    g.add_argument("--eps", type=float, default=_env_default("eps", float, base.eps))
    g.add_argument("--trials", type=int, default=_env_default("trials", int, base.trials))
    g.add_argument("--limit", type=int, default=_env_default("limit", int, base.limit),
                   help="largest n for exhaustive sweeps")
    g.add_argument("--search", default=_env_default("search", str, base.search),
                   choices=("exhaustive", "alternating"))
    return p


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _bits(text: str) -> np.ndarray:
    return check_bits([int(c) for c in text.strip()])


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="holoequiv", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", parents=[common], help="emit an example function and scheme")
    gen.add_argument("kind", choices=("weighted-average", "junta", "parity", "constant"))
    gen.add_argument("--n", type=int)
    gen.add_argument("--uniform", action="store_true", help="uniform weights")
    gen.add_argument("--weights", type=_floats, help="comma-separated weights")
    gen.add_argument("--k", type=int, help="mean-test sample count (default: r(eps))")
    gen.add_argument("--coords", type=_ints, help="0-based junta coordinates")
    gen.add_argument("--table", type=_floats, help="junta values in canonical pattern order")
    gen.add_argument("--value", type=float, default=0.5, help="constant value")
    gen.add_argument("--out", default="-", help="function output path")
    gen.add_argument("--scheme-out", help="scheme output path (default: <out stem>_scheme.json)")

    conv = sub.add_parser("convert", parents=[common], help="convert between representations")
    conv.add_argument("direction", choices=("holo2poly", "poly2nn", "nn2holo", "identicalize"))
    conv.add_argument("input")
    conv.add_argument("output")
    conv.add_argument("--K", type=int, help="compile constant for poly2nn")
    conv.add_argument("--constants", choices=("local", "uniform"), default="local")
    conv.add_argument("--alpha", type=float, help="source accuracy for identicalize")
    conv.add_argument("--report", help="conversion report path (default: <output>.report.json)")

    ver = sub.add_parser("verify", parents=[common], help="run a verification harness")
    ver.add_argument("what", choices=("holo", "supnorm", "pipeline", "lemmas"))
    ver.add_argument("--f", help="function file")
    ver.add_argument("--g", help="function, polynomial or network file")
    ver.add_argument("--scheme", help="scheme file")
    ver.add_argument("--mode", choices=("exact", "monte-carlo"), default="exact")
    ver.add_argument("--bound", type=float, help="supnorm: fail above this error")
    ver.add_argument("--constants", choices=("local", "uniform"), default="local")
    ver.add_argument("--inject-fault", choices=("step_array",), help="lemmas: fault injection")
    ver.add_argument("--report", help="write the JSON report here")

    rep = sub.add_parser("report", parents=[common], help="summarize a serialized artifact")
    rep.add_argument("input")
    rep.add_argument("--instrument", type=_bits, metavar="BITS",
                     help="network/plan: dump per-node sampler records for this input")
    rep.add_argument("--json", action="store_true", help="print JSON instead of text")
    return parser


def _provenance(args, **extra) -> dict:
    return {"seed": args.seed, "command": args.command, "tool_version": __version__, **extra}


def _load(path: str, expected: type | tuple, what: str):
    try:
        obj = load(path)
    except FileNotFoundError as exc:
        raise UsageError(f"{what}: no such file {path}") from exc
    if not isinstance(obj, expected):
        raise SchemaError(f"{what}: {path} holds a {type(obj).__name__}")
    return obj


def _write_report(path: str | None, payload: dict, args):
    if path:
        save(payload, path, _provenance(args))


# -- gen --------------------------------------------------------------------------------------


def cmd_gen(args) -> int:
    kind = args.kind
    scheme = None
    if kind == "weighted-average":
        if args.weights is not None:
            mu = CoordinateMeasure.proportional(args.weights)
        elif args.uniform or args.n:
            if not args.n:
                raise UsageError("--uniform needs --n")
            mu = CoordinateMeasure.uniform(args.n)
        else:
            raise UsageError("give --uniform with --n, or --weights")
        f = WeightedAverage(mu, CLIP)
        if args.k:
            scheme = HoloScheme(mu.n, args.k, [mu] * args.k, MeanTest(CLIP),
                                {"family": "weighted_average"})
        else:
            scheme = build_mean_scheme(mu, CLIP, args.eps)
    elif kind == "junta":
        if not args.coords:
            raise UsageError("junta needs --coords")
        n = args.n or max(args.coords) + 1
        k = len(args.coords)
        table = args.table if args.table is not None else [i / max(2**k - 1, 1) for i in range(2**k)]
        f = Junta(n, tuple(args.coords), table)
        scheme = build_junta_scheme(f)
    elif kind == "parity":
        if not args.n:
            raise UsageError("parity needs --n")
        f = Parity(args.n)
    else:
        if not args.n:
            raise UsageError("constant needs --n")
        f = Junta.constant(args.n, args.value)
        scheme = constant_scheme(args.n, args.value)
    save(f, args.out, _provenance(args, kind=kind))
    if scheme is not None:
        target = args.scheme_out
        if target is None and args.out != "-":
            out = Path(args.out)
            target = str(out.with_name(out.stem + "_scheme.json"))
        if target is not None:
            save(scheme, target, _provenance(args, kind=kind))
            print(f"wrote {args.out} and {target} (k={scheme.k})", file=sys.stderr)
    return EXIT_PASS


# -- convert ----------------------------------------------------------------------------------


def cmd_convert(args) -> int:
    d = args.direction
    if d == "holo2poly":
        scheme = _load(args.input, HoloScheme, "holo2poly input")
        out, rp = holo_to_poly(scheme, args.eps, search=args.search, rng=args.seed)
        report = rp.to_dict()
        if scheme.n <= args.limit:
            X = all_inputs(scheme.n, limit=args.limit)
            F = np.array([averaged_test(scheme, x) for x in X])
            report["error_vs_averaged_test"] = float(np.abs(out.evaluate(X) - F).max())
        summary = (f"q={rp.q} m={rp.m} K={rp.complexity.K} coeff_l1={rp.coeff_l1:.4g}"
                   f" error={report.get('error_vs_averaged_test', 'n/a')}")
    elif d == "poly2nn":
        rep = _load(args.input, PolyRep, "poly2nn input")
        K = args.K or poly_complexity(rep).K
        out = compile_poly_to_nn(rep, K)
        audit, bounds = audit_complexity(out), compiled_bounds(rep, K)
        report = {"K": K, "audit": audit.to_dict(),
                  "bounds": {"vertex_count": bounds.vertex_count, "affine_l1": bounds.affine_l1,
                             "lipschitz": bounds.lipschitz, "Q_l1": bounds.Q_l1}}
        summary = f"vertices={audit.vertex_count} K'={audit.K}"
    elif d == "nn2holo":
        net = _load(args.input, Network, "nn2holo input")
        out = nn_to_holo(net, args.eps, args.constants)
        plan = out.tests.plan
        report = {"eps": args.eps, "constants": args.constants, "K": plan.K,
                  "k": describe_int(out.k), "real_length": plan.real_length,
                  "nodes": len(plan.nodes())}
        summary = f"k={describe_int(out.k)} (real samples {plan.real_length})"
    else:
        scheme = _load(args.input, HoloScheme, "identicalize input")
        out = identicalize(scheme, args.eps, alpha=args.alpha, seed=args.seed)
        report = {"eps": args.eps, "source_k": scheme.k, "r": out.k, **out.metadata}
        summary = f"r={out.k}"
    save(out, args.output, _provenance(args, direction=d, eps=args.eps))
    report_path = args.report
    if report_path is None and args.output != "-":
        report_path = args.output + ".report.json"
    _write_report(report_path, report, args)
    print(f"{d}: {summary}", file=sys.stderr)
    return EXIT_PASS


# -- verify -----------------------------------------------------------------------------------


def cmd_verify(args) -> int:
    what = args.what
    if what == "lemmas":
        rep = lemma_suite((args.seed,), inject_fault=args.inject_fault)
        print(rep.to_text())
        _write_report(args.report, rep.to_dict(), args)
        return EXIT_PASS if rep.passed else EXIT_VIOLATED
    if not args.f:
        raise UsageError(f"verify {what} needs --f")
    f = _load(args.f, object, "--f")
    if not hasattr(f, "evaluate") or not hasattr(f, "n"):
        raise SchemaError("--f must hold a function")
    if what == "supnorm":
        if not args.g:
            raise UsageError("verify supnorm needs --g")
        g = _load(args.g, object, "--g")
        if not hasattr(g, "evaluate"):
            raise SchemaError("--g must hold a function, polynomial or network")
        if getattr(g, "n", f.n) != f.n:
            raise UsageError(f"dimension mismatch: --f has n={f.n}, --g has n={g.n}")
        err, arg = sup_norm_error(f, g, f.n, limit=args.limit)
        passed = args.bound is None or err <= args.bound
        print(f"max error {err:.6g} at {''.join(map(str, arg))}")
        _write_report(args.report, {"max_error": err, "argmax": list(arg),
                                    "bound": args.bound, "passed": passed}, args)
        return EXIT_PASS if passed else EXIT_VIOLATED
    if not args.scheme:
        raise UsageError(f"verify {what} needs --scheme")
    scheme = _load(args.scheme, HoloScheme, "--scheme")
    if what == "holo":
        mode = args.mode
        if scheme.tests.kind == "plan":
            mode = "monte-carlo"
        chk = holo_check(scheme, f, args.eps, mode=mode, trials=args.trials, rng=args.seed,
                         limit=args.limit)
        print(f"holo_check eps={args.eps} mode={mode}: worst failure {chk.worst_failure_rate:.4g}"
              f" at {''.join(map(str, chk.worst_input))} (slack {chk.slack:.3g})"
              f" {'PASS' if chk.passed else 'FAIL'}")
        _write_report(args.report, chk.to_dict(), args)
        return EXIT_PASS if chk.passed else EXIT_VIOLATED
    config = PipelineConfig(seed=args.seed, search=args.search, exhaustive_limit=args.limit,
                            trials=args.trials, constants=args.constants)
    rep = run_pipeline(f, scheme, args.eps, config)
    print(rep.to_text())
    _write_report(args.report, rep.to_dict(), args)
    return EXIT_PASS if rep.passed else EXIT_VIOLATED


# -- report -----------------------------------------------------------------------------------


def _summary(obj) -> dict:
    if isinstance(obj, Network):
        return {"type": "network", "n": obj.n, "output": obj.output,
                "complexity": audit_complexity(obj).to_dict()}
    if isinstance(obj, PolyRep):
        return {"type": "poly_rep", "n": obj.n, "complexity": poly_complexity(obj).to_dict(),
                "terms": len(obj.poly)}
    if isinstance(obj, HoloScheme):
        return {"type": "holo_scheme", "n": obj.n, "k": describe_int(obj.k),
                "tests": obj.tests.kind, "metadata": obj.metadata}
    if isinstance(obj, SamplerPlan):
        return {"type": "sampler_plan", "n": obj.n, "K": obj.K, "delta": obj.delta,
                "length": describe_int(obj.length), "real_length": obj.real_length,
                "nodes": len(obj.nodes())}
    if isinstance(obj, dict):
        return {"type": "report", **obj}
    return {"type": type(obj).__name__, **to_envelope(obj)["payload"]}


def cmd_report(args) -> int:
    obj = load(args.input)
    if args.instrument is not None:
        if isinstance(obj, Network):
            plan = plan_network(obj, args.eps)
        elif isinstance(obj, HoloScheme) and obj.tests.kind == "plan":
            plan = obj.tests.plan
        elif isinstance(obj, SamplerPlan):
            plan = obj
        else:
            raise UsageError("--instrument needs a network, sampler plan or network-derived scheme")
        value, _, records = run_plan(plan, args.instrument, args.seed, instrument=True)
        print(json.dumps({"value": value, "records": records}, indent=1))
        return EXIT_PASS
    info = _summary(obj)
    if args.json:
        print(json.dumps(info, indent=1, default=str))
    else:
        for key, val in info.items():
            print(f"{key}: {json.dumps(val, default=str) if isinstance(val, (dict, list)) else val}")
    return EXIT_PASS


COMMANDS = {"gen": cmd_gen, "convert": cmd_convert, "verify": cmd_verify, "report": cmd_report}


def main(argv=None) -> int:
    try:
        parser = build_parser()
    except UsageError as exc:
        print(f"holoequiv: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_PASS
    try:
        Config(args.seed, args.eps, args.trials, args.limit, args.search)
        return COMMANDS[args.command](args)
    except (UsageError, SchemaError, LimitExceededError) as exc:
        print(f"holoequiv: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AssertionError as exc:
        print(f"holoequiv: bound violated: {exc}", file=sys.stderr)
        return EXIT_VIOLATED
    except (ValueError, TypeError, KeyError) as exc:
        print(f"holoequiv: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"holoequiv: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
