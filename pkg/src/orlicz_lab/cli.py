"""Command-line scenario runner and one-shot evaluators.

Subcommands:

* ``run``            -- execute scenario files, emit report.csv + verdicts.txt
* ``norm``           -- print one Luxemburg norm
* ``example-dyadic`` -- error trace of block averaging on refining interval
                        partitions, as CSV on stdout

Exit codes: 0 all asserted invariants held, 1 verdict mismatch or bound
violation, 2 configuration error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .convergence import (
    AlgebraSequence,
    Delta2RequiredError,
    dyadic_example_trace,
    indicator_bound_check,
    muperp_equivalence_check,
    sandwich_check,
    set_recovery_check,
)
from .measure import (
    DyadicSpace,
    MeasurableSet,
    Partition,
    SpaceMismatchError,
)
from .orlicz import InvariantViolationError, luxemburg_norm, parse_function
from .young import parse_young

INDICATOR_BOUND_TOL = 1e-9
RECOVERY_TOL = 1e-12

_SCENARIO_KEYS = {
    "k": int,
    "weights": str,
    "phi": str,
    "sequence": str,
    "window": int,
    "target": str,
    "tol": float,
    "seed": int,
    "f_random": int,
    "g_battery": int,
    "expect_mu": bool,
    "expect_perp": bool,
    "expect_muperp": bool,
}

_DEFAULTS = {
    "weights": "uniform",
    "window": 64,
    "tol": 1e-3,
    "seed": 0,
    "f_random": 8,
    "g_battery": 32,
}

_REQUIRED = ("k", "phi", "sequence", "target")


class ScenarioError(ValueError):
    """Anything wrong with a scenario file or its field values."""


def _coerce(key: str, raw: str):
    kind = _SCENARIO_KEYS[key]
    if kind is bool:
        low = raw.lower()
        if low in ("true", "false"):
            return low == "true"
        raise ScenarioError(f"key {key!r} expects true/false, got {raw!r}")
    try:
        return kind(raw)
    except ValueError:
        raise ScenarioError(f"key {key!r} expects {kind.__name__}, got {raw!r}") from None


def parse_scenario(text: str) -> dict:
    """Flat ``key = value`` format; # comments; optional quotes on values."""
    cfg = dict(_DEFAULTS)
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ScenarioError(f"line {lineno}: expected 'key = value'")
        key, _, raw = stripped.partition("=")
        key = key.strip().lower()
        raw = raw.strip().strip("\"'")
        if key not in _SCENARIO_KEYS:
            raise ScenarioError(f"line {lineno}: unknown key {key!r}")
        cfg[key] = _coerce(key, raw)
    missing = [k for k in _REQUIRED if k not in cfg]
    if missing:
        raise ScenarioError(f"missing required keys: {', '.join(missing)}")
    return cfg


def build_space(k: int, weights_spec: str) -> DyadicSpace:
    if not 0 <= k <= 20:
        raise ScenarioError("k must lie in [0, 20]")
    name, _, arg = weights_spec.partition(":")
    name = name.strip().lower()
    if name == "uniform":
        return DyadicSpace.uniform(k)
    if name == "random":
        try:
            return DyadicSpace.random(k, int(arg))
        except ValueError:
            raise ScenarioError(f"bad weights seed in {weights_spec!r}") from None
    raise ScenarioError(f"unknown weights spec {weights_spec!r}")


def parse_partition(spec: str, space: DyadicSpace) -> Partition:
    name, _, arg = spec.strip().partition(":")
    name = name.strip().lower()
    try:
        if name == "trivial":
            return Partition.trivial(space)
        if name == "finest":
            return Partition.finest(space)
        if name == "halves":
            return Partition.dyadic(space, 2)
        if name == "quarters":
            return Partition.dyadic(space, 4)
        if name == "shifted-halves":
            return Partition.from_sets(
                space, [MeasurableSet.interval(space, 0.25, 0.75)]
            )
        if name == "dyadic":
            return Partition.dyadic(space, 2 ** int(arg))
        if name == "random":
            n_blocks, seed = (int(t) for t in arg.split(","))
            return Partition.random(space, n_blocks, seed)
    except ValueError as exc:
        raise ScenarioError(f"bad partition spec {spec!r}: {exc}") from None
    raise ScenarioError(f"unknown partition spec {spec!r}")


def build_sequence(spec: str, space: DyadicSpace, window: int) -> AlgebraSequence:
    name, _, arg = spec.strip().partition(":")
    name = name.strip().lower()
    try:
        if name == "dyadic":
            j_start = int(arg) if arg else 1
            return AlgebraSequence.dyadic_refinement(space, window, j_start)
        if name == "constant":
            return AlgebraSequence.constant(parse_partition(arg, space), window)
        if name == "periodic":
            cycle = [parse_partition(t, space) for t in arg.split("|") if t]
            return AlgebraSequence.periodic(cycle, window)
    except (ValueError, ScenarioError) as exc:
        raise ScenarioError(f"bad sequence spec {spec!r}: {exc}") from None
    raise ScenarioError(f"unknown sequence spec {spec!r}")


def resolve_target(spec: str, seq: AlgebraSequence) -> Partition:
    from .measure import lower_limit, upper_limit

    name = spec.strip().lower()
    if name == "upper":
        return upper_limit(seq.partitions)
    if name == "lower":
        return lower_limit(seq.partitions)
    return parse_partition(spec, seq.space)


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def run_scenario(path: Path, out_dir: Path) -> int:
    """Execute one scenario; returns 0 (ok) or 1 (verdict mismatch or
    bound violation).  Raises ScenarioError for configuration problems.
    """
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {path}: {exc}") from None
    cfg = parse_scenario(text)
    space = build_space(cfg["k"], cfg["weights"])
    try:
        phi = parse_young(cfg["phi"])
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None
    seq = build_sequence(cfg["sequence"], space, cfg["window"])
    target = resolve_target(cfg["target"], seq)

    code = 0
    lines: list[str] = []
    try:
        outcome = muperp_equivalence_check(
            seq,
            target,
            phi,
            cfg["tol"],
            n_random_f=cfg["f_random"],
            g_battery_size=cfg["g_battery"],
            seed=cfg["seed"],
        )
    except Delta2RequiredError as exc:
        raise ScenarioError(str(exc)) from None
    except InvariantViolationError as exc:
        print(f"{path}: {exc}", file=sys.stderr)
        return 1

    rows: list[tuple[int, str, float]] = []
    rows.extend(outcome.mu.iter_csv_rows())
    rows.extend(outcome.perp.iter_csv_rows())
    for name, rep in outcome.condexp.items():
        rows.extend(
            (n, f"condexp[{name}]", float(v))
            for n, v in enumerate(rep.traces["condexp_norm"])
        )

    sandwich = sandwich_check(seq)
    for i, res in enumerate(sandwich.amu_results):
        rows.extend(
            (n, f"amu_dist[b{i}]", float(v))
            for n, v in enumerate(res.distances)
        )

    worst_indicator = 0.0
    worst_recovery = -np.inf
    for block in target.block_sets() + sandwich.upper.block_sets():
        worst_indicator = max(worst_indicator,
                              indicator_bound_check(seq, block, phi))
        worst_recovery = max(worst_recovery, set_recovery_check(seq, block))
    if worst_indicator > INDICATOR_BOUND_TOL or worst_recovery > RECOVERY_TOL:
        code = 1

    verdicts = {
        "mu": outcome.verdict_mu,
        "perp": outcome.verdict_perp,
        "muperp": outcome.verdict_muperp,
    }
    lines.append(
        "VERDICT mu={mu} perp={perp} muperp={muperp}".format(
            **{k: str(v).lower() for k, v in verdicts.items()}
        )
    )
    lines.append(f"CONDEXP battery={str(outcome.verdict_condexp).lower()}")
    lines.append(
        "SANDWICH amu={} generators={} muperp={}".format(
            str(sandwich.amu_all_member).lower(),
            str(sandwich.generators_upper_measurable).lower(),
            str(sandwich.muperp).lower(),
        )
    )
    lines.append(
        f"BOUND indicator_max_excess={_fmt(worst_indicator)} "
        f"recovery_max_violation={_fmt(worst_recovery)}"
    )
    for notion in ("mu", "perp", "muperp"):
        key = f"expect_{notion}"
        if key in cfg:
            ok = cfg[key] == verdicts[notion]
            lines.append(
                f"EXPECT {notion} expected={str(cfg[key]).lower()} "
                f"actual={str(verdicts[notion]).lower()} "
                f"{'OK' if ok else 'MISMATCH'}"
            )
            if not ok:
                code = 1

    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "report.csv", "w", newline="") as fh:
        fh.write("n,metric,value\n")
        for n, name, v in rows:
            fh.write(f"{n},{name},{_fmt(v)}\n")
    (out_dir / "verdicts.txt").write_text("\n".join(lines) + "\n")
    return code


def _run_one(path_str: str, out_str: str) -> int:
    try:
        return run_scenario(Path(path_str), Path(out_str))
    except ScenarioError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SpaceMismatchError as exc:
        print(f"config error (space mismatch): {exc}", file=sys.stderr)
        return 2


def _cmd_run(args) -> int:
    out = Path(args.out)
    jobs = max(1, args.jobs)
    targets = [
        (f, str(out if len(args.files) == 1 else out / Path(f).stem))
        for f in args.files
    ]
    if jobs == 1 or len(targets) == 1:
        codes = [_run_one(f, o) for f, o in targets]
    else:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            codes = list(pool.map(_run_one, *zip(*targets)))
    return max(codes)


def _cmd_norm(args) -> int:
    try:
        phi = parse_young(args.phi)
        space = DyadicSpace.uniform(int(args.k))
        f = parse_function(args.f, space)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    print(f"{luxemburg_norm(f, phi):.10g}")
    return 0


def _cmd_example_dyadic(args) -> int:
    try:
        phi = parse_young(args.phi)
        trace = dyadic_example_trace(int(args.nmax), phi, args.f, int(args.k),
                                     tol=args.tol)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except InvariantViolationError as exc:
        print(f"violation: {exc}", file=sys.stderr)
        return 1
    print("n,error")
    for n, err in trace:
        print(f"{n},{_fmt(err)}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="orlicz-lab",
        description="Orlicz-space convergence diagnostics on dyadic grids",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run scenario files")
    p_run.add_argument("files", nargs="+", help="scenario files")
    p_run.add_argument("--out", default="out", help="output directory")
    p_run.add_argument("--jobs", type=int, default=1,
                       help="run scenario files concurrently")
    p_run.set_defaults(handler=_cmd_run)

    p_norm = sub.add_parser("norm", help="print one Luxemburg norm")
    p_norm.add_argument("f", help="function spec, e.g. indicator:0,0.5")
    p_norm.add_argument("phi", help="gauge spec, e.g. power:2")
    p_norm.add_argument("k", help="grid resolution (2**k cells)")
    p_norm.set_defaults(handler=_cmd_norm)

    p_dyn = sub.add_parser("example-dyadic",
                           help="block-averaging error trace on refining "
                                "interval partitions")
    p_dyn.add_argument("nmax", help="largest block count (power of two)")
    p_dyn.add_argument("phi", help="gauge spec")
    p_dyn.add_argument("f", help="function spec")
    p_dyn.add_argument("k", help="grid resolution")
    p_dyn.add_argument("--tol", type=float, default=1e-3,
                       help="required final error bound")
    p_dyn.set_defaults(handler=_cmd_example_dyadic)

    args = parser.parse_args(argv)
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
