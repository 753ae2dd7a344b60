"""Problem-file schema: named objects plus a task list, JSON encoded.

Complex numbers are [re, im] pairs; polynomials are ascending-degree
coefficient arrays; matrices are row-major nested coefficient arrays with
an optional min_pow.  Every task reference is resolved against the
declared objects before any computation starts, so an unknown name fails
the whole file with a field path instead of failing one task mid-run.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Optional

from .blaschke import BlaschkeProduct
from .errors import HardyShiftError
from .invariance import OperatorSpec
from .laurent import LaurentMatrix, from_poly_grid
from .series import taylor
from .subspaces import MonomialSubspace, SpanSubspace, orthonormalize
from .tolerances import ANALYTICITY_TOL, MEMBERSHIP_TOL, RANK_TOL

__all__ = ["ParseError", "ValidationError", "Problem", "Task",
           "load_problem", "parse_problem", "parse_operator_token"]

TASK_KINDS = ("check-invariance", "check-near-invariance", "verify-theta",
              "hitt", "blaschke-transfer", "build-sigma")


class ParseError(HardyShiftError):
    """The problem file is not syntactically valid JSON."""


class ValidationError(HardyShiftError):
    """The problem file parsed but violates the schema; carries the field path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _complex_at(path: str, value: Any) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if (isinstance(value, (list, tuple)) and len(value) == 2
            and all(isinstance(v, (int, float)) for v in value)):
        return complex(value[0], value[1])
    raise ValidationError(path, "expected a number or an [re, im] pair")


def _coeff_list_at(path: str, value: Any) -> list:
    if not isinstance(value, list) or not value:
        raise ValidationError(path, "expected a nonempty coefficient array")
    return [_complex_at(f"{path}[{i}]", v) for i, v in enumerate(value)]


@dataclass
class Task:
    index: int
    kind: str
    params: dict


@dataclass
class Problem:
    cap: int
    tolerances: dict
    polys: dict
    matrices: dict
    blaschke: dict
    subspaces: dict
    tasks: list

    @property
    def membership_tol(self) -> float:
        return self.tolerances["membership"]

    @property
    def rank_tol(self) -> float:
        return self.tolerances["rank"]

    @property
    def analyticity_tol(self) -> float:
        return self.tolerances["analyticity"]


def parse_operator_token(token: Any, problem: "Problem", path: str) -> OperatorSpec:
    """Accepts {"op": ..., ...} dicts or compact "kind:arg[:arg]" strings."""
    if isinstance(token, str):
        bits = token.split(":")
        kind = bits[0]
        if kind in ("shift", "coshift"):
            if len(bits) != 2 or not bits[1].lstrip("-").isdigit():
                raise ValidationError(path, f"bad operator token {token!r}")
            return OperatorSpec(kind, int(bits[1]))
        if kind in ("toeplitz", "toeplitz_adjoint"):
            if len(bits) != 3 or not bits[2].lstrip("-").isdigit():
                raise ValidationError(path, f"bad operator token {token!r}")
            return OperatorSpec(kind, int(bits[2]), _blaschke_ref(problem, bits[1], path))
        raise ValidationError(path, f"unknown operator kind {kind!r}")
    if not isinstance(token, dict) or "op" not in token:
        raise ValidationError(path, "operator must be a string token or an object with 'op'")
    kind = token["op"]
    if kind in ("shift", "coshift"):
        k = token.get("k", token.get("power"))
        if not isinstance(k, int):
            raise ValidationError(path, "shift operators need an integer 'k'")
        return OperatorSpec(kind, k)
    if kind in ("toeplitz", "toeplitz_adjoint"):
        n = token.get("n", token.get("power"))
        if not isinstance(n, int):
            raise ValidationError(path, "toeplitz operators need an integer 'n'")
        name = token.get("blaschke")
        return OperatorSpec(kind, n, _blaschke_ref(problem, name, path))
    raise ValidationError(path, f"unknown operator kind {kind!r}")


def _blaschke_ref(problem: "Problem", name: Any, path: str) -> BlaschkeProduct:
    if not isinstance(name, str) or name not in problem.blaschke:
        raise ValidationError(path, f"unknown blaschke product {name!r}")
    return problem.blaschke[name]


def _subspace_ref(problem: "Problem", name: Any, path: str):
    if not isinstance(name, str) or name not in problem.subspaces:
        raise ValidationError(path, f"unknown subspace {name!r}")
    return problem.subspaces[name]


def _matrix_ref(problem: "Problem", name: Any, path: str) -> LaurentMatrix:
    if not isinstance(name, str) or name not in problem.matrices:
        raise ValidationError(path, f"unknown matrix {name!r}")
    return problem.matrices[name]


def load_problem(path: str, cap: Optional[int] = None,
                 tol: Optional[float] = None) -> Problem:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_problem(data, cap, tol)


def parse_problem(data: Any, cap: Optional[int] = None,
                  tol: Optional[float] = None) -> Problem:
    if not isinstance(data, dict):
        raise ValidationError("$", "problem file must be a JSON object")
    ws = data.get("workspace", {})
    if not isinstance(ws, dict):
        raise ValidationError("workspace", "must be an object")
    file_cap = ws.get("cap", 64)
    if not isinstance(file_cap, int) or file_cap < 1:
        raise ValidationError("workspace.cap", "must be a positive integer")
    if cap is not None:
        file_cap = cap
    tols = {"membership": MEMBERSHIP_TOL, "rank": RANK_TOL,
            "analyticity": ANALYTICITY_TOL}
    ws_tols = ws.get("tolerances", {})
    if not isinstance(ws_tols, dict):
        raise ValidationError("workspace.tolerances", "must be an object")
    for key, val in ws_tols.items():
        if key not in tols:
            raise ValidationError(f"workspace.tolerances.{key}", "unknown tolerance")
        if not isinstance(val, (int, float)) or val <= 0:
            raise ValidationError(f"workspace.tolerances.{key}", "must be positive")
        tols[key] = float(val)
    if tol is not None:
        tols["membership"] = float(tol)

    problem = Problem(file_cap, tols, {}, {}, {}, {}, [])
    objects = data.get("objects", {})
    if not isinstance(objects, dict):
        raise ValidationError("objects", "must be an object")

    for name, coeffs in (objects.get("polys", {}) or {}).items():
        vals = _coeff_list_at(f"objects.polys.{name}", coeffs)
        try:
            problem.polys[name] = taylor(vals, file_cap)
        except HardyShiftError as exc:
            raise ValidationError(f"objects.polys.{name}", str(exc)) from exc

    for name, spec in (objects.get("matrices", {}) or {}).items():
        path = f"objects.matrices.{name}"
        if not isinstance(spec, dict) or "entries" not in spec:
            raise ValidationError(path, "expected an object with 'entries'")
        entries = spec["entries"]
        if not isinstance(entries, list) or not entries:
            raise ValidationError(f"{path}.entries", "expected a nonempty row list")
        grid = []
        for i, row in enumerate(entries):
            if not isinstance(row, list) or not row:
                raise ValidationError(f"{path}.entries[{i}]", "expected a nonempty column list")
            grid.append([_coeff_list_at(f"{path}.entries[{i}][{j}]", e)
                         for j, e in enumerate(row)])
        min_pow = spec.get("min_pow", 0)
        if not isinstance(min_pow, int):
            raise ValidationError(f"{path}.min_pow", "must be an integer")
        try:
            problem.matrices[name] = from_poly_grid(grid, min_pow)
        except HardyShiftError as exc:
            raise ValidationError(path, str(exc)) from exc

    for name, spec in (objects.get("blaschke", {}) or {}).items():
        path = f"objects.blaschke.{name}"
        if not isinstance(spec, dict) or "zeros" not in spec:
            raise ValidationError(path, "expected an object with 'zeros'")
        lam = _complex_at(f"{path}.lambda", spec.get("lambda", 1.0))
        zeros = [_complex_at(f"{path}.zeros[{i}]", z)
                 for i, z in enumerate(spec["zeros"])]
        try:
            problem.blaschke[name] = BlaschkeProduct(lam, zeros)
        except HardyShiftError as exc:
            raise ValidationError(path, str(exc)) from exc

    for name, spec in (data.get("subspaces", {}) or {}).items():
        path = f"subspaces.{name}"
        if not isinstance(spec, dict) or "kind" not in spec:
            raise ValidationError(path, "expected an object with 'kind'")
        kind = spec["kind"]
        if kind == "monomial":
            gens = spec.get("generators", [])
            if not isinstance(gens, list) or not all(isinstance(g, int) for g in gens):
                raise ValidationError(f"{path}.generators", "expected a list of integers")
            exc_set = spec.get("exceptional", [])
            if not isinstance(exc_set, list) or not all(isinstance(e, int) for e in exc_set):
                raise ValidationError(f"{path}.exceptional", "expected a list of integers")
            mcap = spec.get("cap", file_cap)
            if not isinstance(mcap, int) or mcap < 0:
                raise ValidationError(f"{path}.cap", "must be a nonnegative integer")
            try:
                problem.subspaces[name] = MonomialSubspace(tuple(gens), mcap,
                                                           frozenset(exc_set), label=name)
            except HardyShiftError as exc:
                raise ValidationError(path, str(exc)) from exc
        elif kind == "span":
            gen_names = spec.get("generators", [])
            if not isinstance(gen_names, list) or not gen_names:
                raise ValidationError(f"{path}.generators", "expected a nonempty name list")
            gens = []
            for g in gen_names:
                if not isinstance(g, str) or g not in problem.polys:
                    raise ValidationError(f"{path}.generators", f"unknown polynomial {g!r}")
                gens.append(problem.polys[g])
            problem.subspaces[name] = orthonormalize(gens, tols["rank"], label=name)
        else:
            raise ValidationError(f"{path}.kind", f"unknown subspace kind {kind!r}")

    raw_tasks = data.get("tasks", [])
    if not isinstance(raw_tasks, list):
        raise ValidationError("tasks", "must be a list")
    for idx, raw in enumerate(raw_tasks):
        problem.tasks.append(_parse_task(problem, idx, raw))
    return problem


def _int_at(raw: dict, key: str, path: str, minimum: int = 1) -> int:
    val = raw.get(key)
    if not isinstance(val, int) or val < minimum:
        raise ValidationError(f"{path}.{key}", f"must be an integer >= {minimum}")
    return val


def _parse_task(problem: Problem, idx: int, raw: Any) -> Task:
    path = f"tasks[{idx}]"
    if not isinstance(raw, dict) or "task" not in raw:
        raise ValidationError(path, "expected an object with 'task'")
    kind = raw["task"]
    if kind not in TASK_KINDS:
        raise ValidationError(f"{path}.task", f"unknown task {kind!r}")
    params: dict = {}
    if kind in ("check-invariance", "check-near-invariance"):
        params["subspace_name"] = raw.get("subspace")
        params["subspace"] = _subspace_ref(problem, raw.get("subspace"), f"{path}.subspace")
        ops = raw.get("operators")
        if not isinstance(ops, list) or not ops:
            raise ValidationError(f"{path}.operators", "expected a nonempty list")
        params["operators"] = [parse_operator_token(o, problem, f"{path}.operators[{i}]")
                               for i, o in enumerate(ops)]
    elif kind == "verify-theta":
        params["theta_name"] = raw.get("theta")
        params["theta"] = _matrix_ref(problem, raw.get("theta"), f"{path}.theta")
        params["m"] = _int_at(raw, "m", path, 2)
        conds = raw.get("conditions")
        if not isinstance(conds, list) or not conds:
            raise ValidationError(f"{path}.conditions", "expected a nonempty list")
        parsed = []
        for i, c in enumerate(conds):
            if not (isinstance(c, dict) and isinstance(c.get("gamma"), int)
                    and isinstance(c.get("k"), int)):
                raise ValidationError(f"{path}.conditions[{i}]",
                                      "expected {'gamma': int, 'k': int}")
            parsed.append((c["gamma"], c["k"]))
        params["conditions"] = parsed
    elif kind == "hitt":
        params["subspace_name"] = raw.get("subspace")
        sub = _subspace_ref(problem, raw.get("subspace"), f"{path}.subspace")
        if not isinstance(sub, SpanSubspace):
            raise ValidationError(f"{path}.subspace", "hitt needs a span subspace")
        params["subspace"] = sub
        params["m"] = _int_at(raw, "m", path, 2)
        if "theta" in raw:
            params["theta_name"] = raw.get("theta")
            params["theta"] = _matrix_ref(problem, raw.get("theta"), f"{path}.theta")
            params["gamma"] = _int_at(raw, "gamma", path, 1)
            params["k"] = _int_at(raw, "k", path, 1)
    elif kind == "blaschke-transfer":
        params["subspace_name"] = raw.get("subspace")
        sub = _subspace_ref(problem, raw.get("subspace"), f"{path}.subspace")
        if not isinstance(sub, SpanSubspace):
            raise ValidationError(f"{path}.subspace", "transfer needs a span subspace")
        params["subspace"] = sub
        params["blaschke_name"] = raw.get("blaschke")
        params["blaschke"] = _blaschke_ref(problem, raw.get("blaschke"), f"{path}.blaschke")
        params["n"] = _int_at(raw, "n", path, 1)
        if "depth" in raw:
            params["depth"] = _int_at(raw, "depth", path, 1)
        params["near"] = bool(raw.get("near", False))
    else:  # build-sigma
        params["m"] = _int_at(raw, "m", path, 2)
        params["gamma"] = _int_at(raw, "gamma", path, 1)
        params["k"] = _int_at(raw, "k", path, 1)
    return Task(idx, kind, params)
