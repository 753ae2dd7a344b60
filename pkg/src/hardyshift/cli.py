"""Batch front-end: parse a problem file, run the pipelines, emit reports.

The structured report goes to stdout (or --out) and is byte-identical for
identical inputs; the human summary, including wall time, goes to stderr.
Exit status: 0 when every task PASSes, 1 when any task FAILs or ERRORs,
2 on input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from .blaschke import build_wold_frame, transfer_subspace
from .errors import HardyShiftError
from .hitt import build_j_map, certify_theta
from .invariance import (OperatorSpec, check_invariance, check_near_invariance,
                         verify_theorem_multi)
from .laurent import build_sigma
from .problem import (ParseError, Problem, Task, ValidationError,
                      load_problem, parse_problem)
from .report import (check_payload, matrix_payload, matrix_text, poly_pairs,
                     round12, stage_payload)

__all__ = ["main", "run_problem"]


# ---------------------------------------------------------------------------
# task execution
# ---------------------------------------------------------------------------


def _run_checks(problem: Problem, task: Task, near: bool) -> dict:
    sub = task.params["subspace"]
    checks = []
    verdicts = []
    fn = check_near_invariance if near else check_invariance
    for op in task.params["operators"]:
        rep = fn(sub, op, problem.membership_tol)
        checks.append(check_payload(rep))
        verdicts.append(rep.verdict)
    verdict = "PASS" if all(v == "PASS" for v in verdicts) else "FAIL"
    return {"subspace": task.params["subspace_name"], "checks": checks,
            "verdict": verdict}


def _run_verify_theta(problem: Problem, task: Task) -> dict:
    rep = verify_theorem_multi(task.params["theta"], task.params["m"],
                               task.params["conditions"], problem.cap,
                               problem.membership_tol,
                               problem.analyticity_tol, problem.rank_tol)
    out = {
        "theta": task.params["theta_name"],
        "m": task.params["m"],
        "stages": [stage_payload(s) for s in rep.stages],
        "products": [
            {"gamma": g, "k": k, "matrix": matrix_payload(p),
             "text": matrix_text(p)}
            for (g, k), p in rep.products
        ],
        "verdict": rep.verdict,
    }
    return out


def _run_hitt(problem: Problem, task: Task) -> dict:
    sub = task.params["subspace"]
    m = task.params["m"]
    if "theta" in task.params:
        rep = certify_theta(sub, m, task.params["gamma"], task.params["k"],
                            task.params["theta"], problem.membership_tol,
                            problem.analyticity_tol)
        jmap = rep.jmap
        payload = {
            "subspace": task.params["subspace_name"],
            "m": m,
            "kernel": _kernel_payload(jmap.kernel),
            "jmap": _jmap_payload(jmap),
            "certify": {
                "theta": task.params["theta_name"],
                "gamma": task.params["gamma"],
                "k": task.params["k"],
                "stages": [stage_payload(s) for s in rep.stages],
                "product": matrix_payload(rep.product),
                "product_text": matrix_text(rep.product),
            },
            "verdict": rep.verdict,
        }
        return payload
    jmap = build_j_map(sub, m, problem.membership_tol, problem.rank_tol)
    return {
        "subspace": task.params["subspace_name"],
        "m": m,
        "kernel": _kernel_payload(jmap.kernel),
        "jmap": _jmap_payload(jmap),
        "certify": None,
        "verdict": "PASS" if jmap.costable.passed else "FAIL",
    }


def _kernel_payload(E) -> dict:
    return {
        "entries": [poly_pairs(e) for e in E.entries],
        "degenerate": list(E.degenerate),
    }


def _jmap_payload(jmap) -> dict:
    return {
        "dim": jmap.space.dim,
        "isometry_gap": round12(jmap.isometry_gap),
        "coshift_invariance": check_payload(jmap.costable),
        "reconstruction_errors": [round12(d.reconstruction_error)
                                  for d in jmap.decompositions],
        "parseval_gaps": [round12(d.parseval_gap) for d in jmap.decompositions],
    }


def _run_transfer(problem: Problem, task: Task) -> dict:
    sub = task.params["subspace"]
    B = task.params["blaschke"]
    n = task.params["n"]
    depth = task.params.get("depth")
    near = task.params["near"]
    W = build_wold_frame(B, problem.cap, depth)
    shifted = transfer_subspace(sub, B, W, "to_shift", problem.membership_tol)
    order = B.degree * n
    if near:
        direct = check_near_invariance(sub, OperatorSpec.toeplitz_adjoint(B, n),
                                       problem.membership_tol)
        moved = check_near_invariance(shifted, OperatorSpec.coshift(order),
                                      problem.membership_tol)
    else:
        direct = check_invariance(sub, OperatorSpec.toeplitz(B, n),
                                  problem.membership_tol)
        moved = check_invariance(shifted, OperatorSpec.shift(order),
                                 problem.membership_tol)
    agreement = direct.verdict == moved.verdict
    return {
        "subspace": task.params["subspace_name"],
        "blaschke": task.params["blaschke_name"],
        "n": n,
        "depth": W.depth,
        "near": near,
        "direct": check_payload(direct),
        "transferred": check_payload(moved),
        "agreement": agreement,
        "verdict": "PASS" if agreement else "FAIL",
    }


def _run_build_sigma(problem: Problem, task: Task) -> dict:
    mat = build_sigma(task.params["m"], task.params["gamma"], task.params["k"])
    return {
        "m": task.params["m"],
        "gamma": task.params["gamma"],
        "k": task.params["k"],
        "matrix": matrix_payload(mat),
        "text": matrix_text(mat),
        "verdict": "PASS",
    }


_RUNNERS = {
    "check-invariance": lambda p, t: _run_checks(p, t, near=False),
    "check-near-invariance": lambda p, t: _run_checks(p, t, near=True),
    "verify-theta": _run_verify_theta,
    "hitt": _run_hitt,
    "blaschke-transfer": _run_transfer,
    "build-sigma": _run_build_sigma,
}


def _execute(problem: Problem, task: Task) -> dict:
    base = {"index": task.index, "task": task.kind}
    try:
        base.update(_RUNNERS[task.kind](problem, task))
    except HardyShiftError as exc:
        base["verdict"] = "ERROR"
        base["error"] = {"type": type(exc).__name__, "message": str(exc)}
    return base


def run_problem(problem: Problem, jobs: int = 1) -> dict:
    """Execute all tasks; the report order follows the task index, not
    completion order, so concurrent runs stay deterministic."""
    if jobs > 1 and len(problem.tasks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda t: _execute(problem, t), problem.tasks))
    else:
        results = [_execute(problem, t) for t in problem.tasks]
    counts = {"pass": 0, "fail": 0, "error": 0}
    for r in results:
        counts[r["verdict"].lower() if r["verdict"] in ("PASS", "FAIL") else "error"] += 1
    verdict = "PASS" if counts["fail"] == 0 and counts["error"] == 0 else "FAIL"
    return {
        "tool": "hardyshift",
        "version": __version__,
        "workspace": {
            "cap": problem.cap,
            "tolerances": {k: round12(v) for k, v in sorted(problem.tolerances.items())},
        },
        "tasks": results,
        "summary": {**counts, "verdict": verdict},
    }


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=None,
                   help="membership tolerance override")
    p.add_argument("--cap", type=int, default=None, help="degree cap override")
    p.add_argument("--jobs", type=int, default=1, help="concurrent task workers")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--out", default=None, help="write the report here instead of stdout")


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hardyshift",
                                 description="invariance / near-invariance "
                                             "verification on capped Hardy-space models")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute every task in a problem file")
    run.add_argument("problem")
    _add_common(run)

    for name, help_text in (
        ("check-invariance", "membership check of operator images"),
        ("check-near-invariance", "definition-based near-invariance check"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("problem")
        p.add_argument("--subspace", required=True)
        p.add_argument("--op", action="append", required=True,
                       help="operator token, e.g. shift:2 or toeplitz:B:1")
        _add_common(p)

    p = sub.add_parser("verify-theta", help="simultaneous-invariance pipeline")
    p.add_argument("problem")
    p.add_argument("--theta", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--cond", action="append", required=True,
                   help="gamma:k pair, repeatable")
    _add_common(p)

    p = sub.add_parser("hitt", help="kernel extraction / decomposition / certification")
    p.add_argument("problem")
    p.add_argument("--subspace", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--theta")
    p.add_argument("--gamma", type=int)
    p.add_argument("--k", type=int)
    _add_common(p)

    p = sub.add_parser("blaschke-transfer", help="verdict transfer across the unitary")
    p.add_argument("problem")
    p.add_argument("--subspace", required=True)
    p.add_argument("--blaschke", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--depth", type=int)
    p.add_argument("--near", action="store_true",
                   help="compare near-invariance instead of invariance")
    _add_common(p)

    p = sub.add_parser("build-sigma", help="print a block shift matrix")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--gamma", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    _add_common(p)
    return ap


def _single_task_raw(args: argparse.Namespace) -> dict:
    if args.command in ("check-invariance", "check-near-invariance"):
        return {"task": args.command, "subspace": args.subspace, "operators": args.op}
    if args.command == "verify-theta":
        conds = []
        for c in args.cond:
            bits = c.split(":")
            if len(bits) != 2 or not all(b.isdigit() for b in bits):
                raise ValidationError("--cond", f"expected gamma:k, got {c!r}")
            conds.append({"gamma": int(bits[0]), "k": int(bits[1])})
        return {"task": "verify-theta", "theta": args.theta, "m": args.m,
                "conditions": conds}
    if args.command == "hitt":
        raw = {"task": "hitt", "subspace": args.subspace, "m": args.m}
        if args.theta is not None:
            if args.gamma is None or args.k is None:
                raise ValidationError("--theta", "certification needs --gamma and --k")
            raw.update({"theta": args.theta, "gamma": args.gamma, "k": args.k})
        return raw
    if args.command == "blaschke-transfer":
        raw = {"task": "blaschke-transfer", "subspace": args.subspace,
               "blaschke": args.blaschke, "n": args.n, "near": args.near}
        if args.depth is not None:
            raw["depth"] = args.depth
        return raw
    return {"task": "build-sigma", "m": args.m, "gamma": args.gamma, "k": args.k}


def _render_text(report: dict) -> str:
    lines = [f"hardyshift {report['version']}  cap={report['workspace']['cap']}"]
    for t in report["tasks"]:
        lines.append(f"task[{t['index']}] {t['task']}: {t['verdict']}")
        for chk in t.get("checks", []) or []:
            wit = ""
            if chk["witness"] is not None:
                wit = f"  witness residual {chk['witness']['residual']}"
            lines.append(f"  {chk['operator']} on {chk['subspace']}: {chk['verdict']}{wit}")
        for st in t.get("stages", []) or []:
            det = f"  {st['detail']}" if st.get("detail") else ""
            lines.append(f"  {st['name']}: {st['verdict']}{det}")
        for prod in t.get("products", []) or []:
            lines.append(f"  product gamma={prod['gamma']} k={prod['k']}:")
            for row in prod["text"]:
                lines.append(f"    {row}")
        if t.get("task") == "build-sigma" and "text" in t:
            for row in t["text"]:
                lines.append(f"  {row}")
        if "error" in t:
            lines.append(f"  {t['error']['type']}: {t['error']['message']}")
    s = report["summary"]
    lines.append(f"summary: pass={s['pass']} fail={s['fail']} error={s['error']} "
                 f"verdict={s['verdict']}")
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    started = time.monotonic()
    try:
        if args.command == "run":
            problem = load_problem(args.problem, args.cap, args.tol)
        elif args.command == "build-sigma":
            problem = parse_problem({"workspace": {}, "tasks": [_single_task_raw(args)]},
                                    args.cap, args.tol)
        else:
            problem = load_problem(args.problem, args.cap, args.tol)
            problem.tasks = []
            from .problem import _parse_task

            problem.tasks.append(_parse_task(problem, 0, _single_task_raw(args)))
    except (ParseError, ValidationError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2

    report = run_problem(problem, max(1, args.jobs))
    payload = (json.dumps(report, indent=2, ensure_ascii=False) + "\n"
               if args.format == "json" else _render_text(report))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)
    elapsed = time.monotonic() - started
    s = report["summary"]
    print(f"{s['pass']} pass, {s['fail']} fail, {s['error']} error "
          f"in {elapsed:.3f}s -> {s['verdict']}", file=sys.stderr)
    return 0 if s["verdict"] == "PASS" else 1


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
