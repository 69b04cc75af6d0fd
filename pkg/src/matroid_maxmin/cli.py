"""Command-line interface.

Exit codes: 0 success, 1 input error, 2 infeasible at the requested target,
3 size guard exceeded, 4 verification failure (or ``bench
--assert-iterations`` exceeded).
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import formats
from .errors import InternalError, InvalidInputError, MaxMinError, ParameterError, UnsupportedScaleError
from .generate import Profile, generate_instance
from .model import derive_params
from .oracles.brute import brute_force_matroid_maxmin, brute_force_santa_opt
from .oracles.verify import verify_solution
from .santa import apply_greedy_topup, evaluate_solution, solve, solve_at
from .solver import Stuck, run

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_SCALE, EXIT_VERIFY = 0, 1, 2, 3, 4

log = logging.getLogger("matroid_maxmin")


class Infeasible(MaxMinError):
    pass


def _write(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


class _TraceSink:
    """Collects trace events as JSON lines for a file or stderr."""

    def __init__(self, path: str | None):
        self.path = path
        self.to_stderr = path is None and os.environ.get("MAXMIN_TRACE") == "1"
        self.lines: list[str] = []

    @property
    def active(self) -> bool:
        return bool(self.path) or self.to_stderr

    def __call__(self, event) -> None:
        self.lines.append(event.to_json())

    def flush(self) -> None:
        text = "".join(line + "\n" for line in self.lines)
        if self.path:
            Path(self.path).write_text(text, encoding="utf-8")
        elif self.to_stderr:
            sys.stderr.write(text)


def _target(args, f: formats.InstanceFile):
    return args.target if args.target is not None else f.target


def _solve_file(f: formats.InstanceFile, args, tracer=None) -> formats.SolutionFile:
    eps = args.epsilon
    T = _target(args, f)
    if f.kind == "santa":
        inst = f.instance
        if T is None:
            sol = solve(inst, eps, mode=args.partition, search=args.search,
                        greedy_topup=args.greedy_topup, tracer=tracer)
        else:
            sol = solve_at(inst, T, eps, mode=args.partition, tracer=tracer)
            if isinstance(sol, Stuck):
                raise Infeasible(f"no assignment certified at T={T}: {sol.describe()}")
            if args.greedy_topup:
                apply_greedy_topup(inst, sol)
        return formats.santa_solution_file(inst, sol, args.partition)
    if T is None:
        raise InvalidInputError("matroid instances need target_T in the file or --target")
    alloc = f.instance.with_target(T)
    out = run(f.matroid, alloc, eps, tracer=tracer)
    if isinstance(out, Stuck):
        raise Infeasible(f"no solution at T={T}: {out.describe()}")
    return formats.matroid_solution_file(formats.InstanceFile(
        f.kind, alloc, T, f.matroid_spec, f.resource_ids, f.matroid, f.ground_ids, f.resource_eligible), out)


def cmd_solve(args) -> int:
    f = formats.load_instance(args.input)
    sink = _TraceSink(args.trace)
    sol = _solve_file(f, args, sink if sink.active else None)
    doc = sol.to_doc()
    if args.seed is not None:
        doc["seed"] = args.seed
    _write(formats.dumps(doc), args.out)
    sink.flush()
    return EXIT_OK


def cmd_trace(args) -> int:
    f = formats.load_instance(args.input)
    sink = _TraceSink(None)
    _solve_file(f, args, sink)
    _write("".join(line + "\n" for line in sink.lines), args.out)
    return EXIT_OK


def cmd_brute(args) -> int:
    f = formats.load_instance(args.input)
    if f.kind == "santa":
        inst = f.instance
        res = brute_force_santa_opt(inst)
        doc = {
            "opt": res.opt,
            "witness": [
                {"gift": inst.gift_ids[j], "child": inst.child_ids[i]}
                for j, i in enumerate(res.witness)
                if i is not None
            ],
        }
    else:
        res = brute_force_matroid_maxmin(f.matroid, f.instance)
        ids = f.element_ids
        res_ids = [f.resource_ids[w] for w in sorted(f.instance.values)]
        doc = {
            "opt": res.opt,
            "basis": [ids[i] for i in sorted(res.basis)],
            "witness": [
                {"resource": res_ids[k], "element": ids[i]} for k, i in enumerate(res.witness) if i is not None
            ],
        }
    _write(formats.dumps(doc), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    f = formats.load_instance(args.input)
    sol = formats.load_solution(args.solution)
    if sol.kind != f.kind:
        raise InvalidInputError(f"solution is for a {sol.kind} instance, not {f.kind}")
    if f.kind == "santa":
        inst = f.instance
        report = evaluate_solution(inst, formats.santa_assignment(inst, sol))
        violations = list(report.violations)
        if sol.objective != report.objective:
            violations.append(f"stated objective {sol.objective} differs from recomputed {report.objective}")
        expected = {str(inst.child_ids[i]): v for i, v in enumerate(report.per_child)}
        if sol.per_child and sol.per_child != expected:
            violations.append("per-child values differ from the assignment")
        doc = {"valid": not violations, "objective": report.objective, "violations": violations}
    else:
        index = {x: i for i, x in enumerate(f.element_ids)}
        rindex = {x: w for w, x in enumerate(f.resource_ids)}
        try:
            S = [index[x] for x in sol.basis]
            M = {index[e]: frozenset(rindex[r] for r in rs) for e, rs, _ in sol.matching}
        except KeyError as exc:
            raise InvalidInputError(f"solution references unknown id {exc.args[0]!r}") from None
        alloc = f.instance.with_target(sol.T)
        threshold = derive_params(alloc, sol.epsilon).beta_threshold
        report = verify_solution(f.matroid, alloc, S, M, threshold)
        violations = list(report.violations)
        stated = {index[e]: v for e, _, v in sol.matching}
        for i, rs in M.items():
            if stated[i] != alloc.value(rs & alloc.resources):
                violations.append(f"stated value of element {f.element_ids[i]} is wrong")
        doc = {"valid": not violations, "threshold": formats.rational_str(threshold), "violations": violations}
    _write(formats.dumps(doc), args.out)
    return EXIT_OK if doc["valid"] else EXIT_VERIFY


def cmd_generate(args) -> int:
    profile = Profile(args.children, args.gifts, args.values, formats.rational(args.density))
    inst = generate_instance(args.seed, profile)
    doc = formats.instance_to_doc(formats.santa_instance_file(inst, args.target))
    _write(formats.dumps(doc), args.out)
    return EXIT_OK


BENCH_FIELDS = ["instance", "kind", "status", "T", "objective", "phases", "iterations", "max_layers", "collapses"]


def _bench_one(task):
    path, opts = task
    args = argparse.Namespace(**opts)
    start = time.perf_counter()
    row = {"instance": Path(path).name, "kind": "", "status": "ok", "T": "", "objective": ""}
    row.update({k: "" for k in ("phases", "iterations", "max_layers", "collapses")})
    try:
        f = formats.load_instance(path)
        row["kind"] = f.kind
        sol = _solve_file(f, args)
        row["T"] = sol.T
        if sol.kind == "santa":
            row["objective"] = sol.objective
        else:
            row["objective"] = min((v for _, _, v in sol.matching), default=0)
        row.update(sol.stats)
    except Infeasible:
        row["status"] = "infeasible"
    except UnsupportedScaleError:
        row["status"] = "scale"
    except (InvalidInputError, ParameterError):
        row["status"] = "input-error"
    row["wall_ms"] = f"{(time.perf_counter() - start) * 1000:.1f}"
    return row


def cmd_bench(args) -> int:
    suite = Path(args.suite)
    if not suite.is_dir():
        raise InvalidInputError(f"{suite} is not a directory")
    paths = sorted(str(p) for p in suite.glob("*.json"))
    opts = {
        "epsilon": args.epsilon,
        "partition": args.partition,
        "search": args.search,
        "target": None,
        "greedy_topup": False,
    }
    tasks = [(p, opts) for p in paths]
    if args.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_bench_one, tasks))
        # results come back in submission order, so the CSV stays deterministic
    else:
        rows = [_bench_one(t) for t in tasks]
    fields = BENCH_FIELDS + (["wall_ms"] if args.timing else [])
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    _write(buf.getvalue(), args.out)
    if args.assert_iterations is not None:
        over = [r["instance"] for r in rows if r["iterations"] != "" and r["iterations"] > args.assert_iterations]
        if over:
            print(f"iteration budget {args.assert_iterations} exceeded by: {', '.join(over)}", file=sys.stderr)
            return EXIT_VERIFY
    return EXIT_OK


def _epsilon(text: str):
    try:
        eps = formats.rational(text)
    except InvalidInputError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if eps <= 0:
        raise argparse.ArgumentTypeError("epsilon must be positive")
    return eps


def _solve_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--in", dest="input", required=True, help="instance JSON file")
    p.add_argument("--epsilon", type=_epsilon, default=formats.rational("1/20"), help="rational, default 1/20")
    p.add_argument("--partition", choices=["default", "adaptive"], default="default")
    p.add_argument("--search", choices=["solver", "lp"], default="solver")
    p.add_argument("--target", type=int, help="solve at this T instead of searching (overrides target_T)")
    p.add_argument("--greedy-topup", action="store_true", help="hand leftover gifts to the poorest eligible child")
    p.add_argument("--seed", type=int, help="recorded in the output; the solver itself is deterministic")
    p.add_argument("--out", help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="matroid-maxmin", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve an instance")
    _solve_flags(p)
    p.add_argument("--trace", help="write trace events as JSON lines to this file")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("trace", help="print the solver trace as JSON lines")
    _solve_flags(p)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("brute", help="exact optimum of a small instance")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_brute)

    p = sub.add_parser("verify", help="check a solution file against an instance")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--solution", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("generate", help="generate a seeded Santa Claus instance")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--children", type=int, required=True)
    p.add_argument("--gifts", type=int, required=True)
    p.add_argument("--values", default="uniform:1:100", help="uniform:lo:hi, const:v or twovalue:small:large:p")
    p.add_argument("--density", default="1/2", help="eligibility probability as a rational")
    p.add_argument("--target", type=int, help="store target_T in the file")
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("bench", help="solve every *.json in a directory and write CSV")
    p.add_argument("suite")
    p.add_argument("--epsilon", type=_epsilon, default=formats.rational("1/20"))
    p.add_argument("--partition", choices=["default", "adaptive"], default="default")
    p.add_argument("--search", choices=["solver", "lp"], default="solver")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--assert-iterations", type=int)
    p.add_argument("--timing", action="store_true", help="add a wall_ms column (not reproducible)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s", stream=sys.stderr)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except Infeasible as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except UnsupportedScaleError as exc:
        print(f"too large: {exc}", file=sys.stderr)
        return EXIT_SCALE
    except (InvalidInputError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
