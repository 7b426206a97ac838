"""Command-line reports over the catalog.

    gospace list [--json] [--row N]
    gospace analyze row9 --n 1 --lambda 2 [--json | --csv]
    gospace table1 [--all] [--seed S] [--csv | --json]

Exit codes: 0 consistent, 1 structural failure, 2 INDETERMINATE present,
64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .flow import closure_dim_estimate, orbit_trajectory, planarity_residual
from .goverify import (
    ACCEPT_TOL,
    DEFAULT_SAMPLES,
    REJECT_TOL,
    Verdict,
    cross_validate,
    natural_reductivity_residual,
)
from .homspace import (
    CATALOG,
    SUPPORTED_ROWS,
    TABLE1_ROWS,
    CatalogError,
    FiberOperator,
    Lambda,
    Normal,
    build_space,
    catalog_manifest,
    hamiltonian,
    metric_operator,
    resolve_params,
)
from .poisson import (
    NonCommutingFamilyError,
    build_family,
    centrality_residuals,
    commutativity_residual,
    completeness_check,
)
from .structure import generic_dims

SCHEMA_VERSION = "1"
TABLE1_LAMBDAS = (0.3, 0.5, 2.0, 5.0)

EXIT_OK, EXIT_STRUCTURAL, EXIT_INDETERMINATE, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- serialization ----------------------------------------------------------

def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return json.dumps(str(x))
    s = format(x, ".17g")
    if "e" not in s and "." not in s:
        s += ".0"
    return s


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {dumps(v, indent, _level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _envelope(kind: str) -> dict:
    return {"schema_version": SCHEMA_VERSION, "tool": "gospace", "version": __version__,
            "kind": kind}


def _resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    env = os.environ.get("GOSPACE_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"GOSPACE_SEED must be an integer, got {env!r}") from None


def _parse_fiber(text: str) -> FiberOperator:
    kind, _, rest = text.partition(":")
    if kind != "diag" or not rest:
        raise UsageError(f"--fiber expects diag:a,b,..., got {text!r}")
    try:
        values = [float(v) for v in rest.split(",")]
    except ValueError:
        raise UsageError(f"--fiber expects numbers, got {rest!r}") from None
    return FiberOperator.diag(values)


# -- list -------------------------------------------------------------------

def cmd_list(args) -> tuple[dict, int]:
    entries = catalog_manifest()
    if args.row is not None:
        rid = f"row{args.row}"
        if rid not in CATALOG:
            raise UsageError(f"no classification row {args.row}")
        entries = [CATALOG[rid].manifest()]
    doc = _envelope("list")
    doc["entries"] = entries
    return doc, EXIT_OK


def _list_text(doc: dict) -> str:
    lines = []
    for e in doc["entries"]:
        ch = e["chain"]
        status = "supported" if e["supported"] else f"unsupported ({e['note']})"
        params = ",".join(f"{k}>={v['min']}" for k, v in e["params"].items()) or "-"
        lines.append(f"{e['id']:<9} {ch['g']} > {ch['k']} > {ch['h']}  [{params}]  {status}")
    return "\n".join(lines) + "\n"


# -- analyze ----------------------------------------------------------------

def _structural(space) -> dict:
    residuals = space.orbit_residuals()
    measured = space.measured_flags()
    claimed = sorted(space.entry.flags)
    return {
        "dims": {"g": space.dim, "h": space.dim_h, "l": space.dim_l, "m": space.dim_m},
        "ambient_dim": space.g.ambient_dim,
        "residuals": residuals,
        "claimed_flags": claimed,
        "measured_flags": measured,
        "base_point": space.base_point is not None,
        "base_point_residual": space.base_point_residual(),
        "threshold": 1e-9,
        "ok": max(residuals.values()) <= 1e-9 and all(measured[f] <= 1e-9 for f in claimed),
    }


def _poisson_section(space, metric, seed: int, n_samples: int, accept: float) -> list[dict]:
    recipes = [("h0", ["h0"])]
    if space.dim_l:
        recipes.append(("h0+delta", ["h0", "delta"]))
        if "lh_commute" in space.flags:
            A = np.diag(np.arange(1.0, space.dim_l + 1))
            recipes.append(("h0+delta+q_A", ["h0", "delta", ("q_A", A)]))
        if {"lh_commute", "l_abelian"} <= space.flags and space.dim_m:
            recipes.append(("traces_m+linear_l", ["h0", ("m_traces_l_linear", 2)]))
    out = []
    for name, recipe in recipes:
        fam = build_family(space, recipe)
        entry = {"recipe": name, "members": fam.labels}
        comm = commutativity_residual(fam, n_samples, seed)
        entry["commutativity_residual"] = comm.residual
        entry["threshold"] = accept
        try:
            entry["completeness"] = completeness_check(space, fam, n_samples, seed, accept).to_dict()
        except NonCommutingFamilyError:
            entry["completeness"] = None
        out.append(entry)
    h_A = hamiltonian(space, metric).h_A
    res = centrality_residuals(h_A, n_samples, seed)
    out.append({"recipe": "metric_hamiltonian_centrality", "members": [h_A.label],
                "max_residual": max(res), "threshold": accept, "central": max(res) < accept})
    return out


def _flow_section(space, metric, seed: int, verdict: Verdict) -> dict | None:
    if space.base_point is None or verdict is not Verdict.GO:
        return None
    rng = np.random.default_rng(seed)
    X = space.random_vector(rng, "v")
    traj = orbit_trajectory(space, metric, X / np.linalg.norm(X), seed=seed)
    est = closure_dim_estimate(space, traj.Z)
    return {
        "t_max": float(traj.times[-1]),
        "n_steps": len(traj.times),
        "norm_error": traj.norm_error(),
        "planarity_residual": planarity_residual(traj),
        "closure": est.to_dict(),
    }


def analyze_report(catalog_id: str, params: dict, metric, seed: int = 0,
                   n_samples: int = DEFAULT_SAMPLES, accept: float = ACCEPT_TOL,
                   reject: float = REJECT_TOL) -> tuple[dict, int]:
    doc = _envelope("analyze")
    doc.update({"space": {"id": catalog_id, "params": params}, "metric": metric.describe(),
                "seed": seed, "n_samples": n_samples,
                "thresholds": {"accept": accept, "reject": reject}})
    try:
        space = build_space(catalog_id, params)
    except CatalogError as exc:
        doc["structural"] = {"ok": False, "error": str(exc)}
        return doc, EXIT_STRUCTURAL
    metric_operator(space, metric)
    doc["space"]["params"] = dict(space.params)
    doc["structural"] = _structural(space)
    if not doc["structural"]["ok"]:
        return doc, EXIT_STRUCTURAL

    cv = cross_validate(space, metric, n_samples, seed, accept, reject)
    go = cv.to_dict()
    if not isinstance(metric, FiberOperator):
        go["natural_reductivity_residual"] = natural_reductivity_residual(space, metric)
    doc["go"] = go

    complexity = {"v": generic_dims(space, n_samples, seed, "v").to_dict()}
    if space.dim_l and space.dim_m:
        complexity["m"] = generic_dims(space, n_samples, seed, "m").to_dict()
    doc["complexity"] = complexity
    doc["poisson"] = _poisson_section(space, metric, seed, n_samples, accept)
    doc["flow"] = _flow_section(space, metric, seed, cv.verdict)

    indeterminate = any(v is Verdict.INDETERMINATE for v in cv.verdicts.values()) or not cv.agree
    if doc["flow"] and doc["flow"]["closure"]["indeterminate"]:
        indeterminate = True
    if not all(c["consistent"] for c in complexity.values()):
        return doc, EXIT_STRUCTURAL
    return doc, EXIT_INDETERMINATE if indeterminate else EXIT_OK


def _flatten(prefix: str, obj, rows: list):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, rows)
    elif isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, rows)
    elif isinstance(obj, list):
        rows.append((prefix, ";".join(_cell(v) for v in obj)))
    else:
        rows.append((prefix, _cell(obj)))


def _cell(v) -> str:
    if isinstance(v, bool) or v is None:
        return str(v).lower() if v is not None else ""
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _analyze_text(doc: dict) -> str:
    if "go" not in doc:
        return f"structural failure: {doc['structural'].get('error', 'see --json')}\n"
    go = doc["go"]
    lines = [f"{doc['space']['id']} {doc['space']['params']} metric={doc['metric']}",
             f"verdict: {go['verdict']} (sampled certificate), "
             f"criteria agree: {go['agree']}"]
    for name, c in go["criteria"].items():
        lines.append(f"  {name:<15} {c['verdict']:<14} max residual {c['max_residual']:.3e}")
    for sub, c in doc["complexity"].items():
        lines.append(f"complexity on {sub}: ddim={c['ddim']} dind={c['dind']} c={c['complexity']}"
                     f"{'' if c['consistent'] else ' INCONSISTENT'}")
    for fam in doc["poisson"]:
        if "completeness" in fam:
            comp = fam["completeness"]
            tail = (f"ddim_B={comp['ddim_B']} target={comp['target']} complete={comp['complete']}"
                    if comp else "not commutative")
            lines.append(f"family {fam['recipe']}: commutator {fam['commutativity_residual']:.2e}, {tail}")
        else:
            lines.append(f"{fam['recipe']}: central={fam['central']}")
    if doc["flow"]:
        f = doc["flow"]
        lines.append(f"flow: closure dim {f['closure']['dim']}, planarity {f['planarity_residual']:.3e}, "
                     f"norm error {f['norm_error']:.1e}")
    return "\n".join(lines) + "\n"


# -- table1 -----------------------------------------------------------------

def table1_report(seed: int = 0, include_all: bool = False, n_samples: int = DEFAULT_SAMPLES,
                  lambdas=TABLE1_LAMBDAS) -> tuple[dict, int]:
    doc = _envelope("table1")
    doc.update({"seed": seed, "lambdas": list(lambdas), "n_samples": n_samples,
                "thresholds": {"accept": ACCEPT_TOL, "reject": REJECT_TOL}})
    rows = []
    code = EXIT_OK
    for rid in (TABLE1_ROWS if include_all else SUPPORTED_ROWS):
        entry = CATALOG[rid]
        row = {"row": entry.table_row, "id": rid, "supported": entry.supported,
               "chain": f"{entry.g} > {entry.k} > {entry.h}"}
        if not entry.supported:
            row.update({"params": {}, "verdicts": {}, "max_residual": None, "agree": None,
                        "lambda_independent": None, "ddim": None, "dind": None,
                        "complexity": None, "note": entry.note})
            rows.append(row)
            continue
        space = build_space(rid)
        verdicts, worst, agree = {}, 0.0, True
        for lam in lambdas:
            cv = cross_validate(space, Lambda(lam), n_samples, seed)
            verdicts[f"{lam:g}"] = cv.verdict.value
            agree &= cv.agree
            worst = max(worst, *cv.geodesic, *cv.centrality, *(cv.gordon or []))
        rep = generic_dims(space, n_samples, seed, "v")
        row.update({"params": dict(space.params), "verdicts": verdicts, "max_residual": worst,
                    "agree": agree, "lambda_independent": len(set(verdicts.values())) == 1,
                    "ddim": rep.ddim, "dind": rep.dind, "complexity": rep.complexity, "note": ""})
        if Verdict.INDETERMINATE.value in verdicts.values() or not agree:
            code = EXIT_INDETERMINATE
        rows.append(row)
    doc["rows"] = rows
    return doc, code


def _table1_rows(doc: dict):
    header = (["row", "id", "params"] + [f"verdict_lambda_{l:g}" for l in doc["lambdas"]]
              + ["max_residual", "agree", "lambda_independent", "ddim", "dind", "complexity",
                 "supported"])
    out = []
    for r in doc["rows"]:
        params = ";".join(f"{k}={v}" for k, v in r["params"].items())
        out.append([r["row"], r["id"], params]
                   + [r["verdicts"].get(f"{l:g}", "unsupported") for l in doc["lambdas"]]
                   + [_cell(r["max_residual"]), _cell(r["agree"]), _cell(r["lambda_independent"]),
                      _cell(r["ddim"]), _cell(r["dind"]), _cell(r["complexity"]),
                      _cell(r["supported"])])
    return header, out


# -- entry point ------------------------------------------------------------

def _parser() -> _Parser:
    p = _Parser(prog="gospace", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"gospace {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    pl = sub.add_parser("list", help="catalog manifest")
    pl.add_argument("--row", type=int)
    pl.add_argument("--json", action="store_true")

    pa = sub.add_parser("analyze", help="full report for one catalog entry")
    pa.add_argument("id", nargs="?", help="catalog id, e.g. row9 or sphere")
    which = pa.add_mutually_exclusive_group()
    which.add_argument("--row", type=int)
    which.add_argument("--pair", help="auxiliary entry: sphere, so-un, so-group")
    pa.add_argument("--n", type=int)
    pa.add_argument("--r", type=int)
    metric = pa.add_mutually_exclusive_group()
    metric.add_argument("--lambda", dest="lam", type=float)
    metric.add_argument("--fiber")
    pa.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    pa.add_argument("--seed", type=int)
    pa.add_argument("--tol-accept", type=float, default=ACCEPT_TOL)
    pa.add_argument("--tol-reject", type=float, default=REJECT_TOL)
    fmt = pa.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--csv", action="store_true")

    pt = sub.add_parser("table1", help="g.o. verdicts for the supported classification rows")
    pt.add_argument("--all", action="store_true", help="include unsupported rows")
    pt.add_argument("--seed", type=int)
    pt.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    fmt = pt.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--csv", action="store_true")
    return p


def _analyze_args(args):
    ids = [v for v in (args.id, f"row{args.row}" if args.row is not None else None, args.pair) if v]
    if len(ids) != 1:
        raise UsageError("give exactly one of ID, --row or --pair")
    cid = ids[0]
    if cid not in CATALOG:
        raise UsageError(f"unknown catalog id {cid!r}")
    params = {k: getattr(args, k) for k in ("n", "r") if getattr(args, k) is not None}
    if args.fiber:
        metric = _parse_fiber(args.fiber)
    elif args.lam is not None:
        if not args.lam > 0:
            raise UsageError("--lambda must be positive")
        metric = Lambda(args.lam)
    else:
        metric = Normal()
    if args.samples < 4:
        raise UsageError("--samples must be >= 4")
    if not 0 < args.tol_accept < args.tol_reject:
        raise UsageError("need 0 < --tol-accept < --tol-reject")
    return cid, params, metric


def _validate_metric(cid: str, params: dict, metric) -> None:
    try:
        resolve_params(cid, params)
    except CatalogError as exc:
        raise UsageError(str(exc)) from None
    try:
        space = build_space(cid, params)
    except CatalogError:
        return  # reported as a structural failure
    try:
        metric_operator(space, metric)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def main(argv=None) -> int:
    out = sys.stdout
    try:
        args = _parser().parse_args(argv)
        if args.command == "list":
            doc, code = cmd_list(args)
            out.write(dumps(doc) + "\n" if args.json else _list_text(doc))
            return code
        seed = _resolve_seed(args.seed)
        if args.command == "analyze":
            cid, params, metric = _analyze_args(args)
            _validate_metric(cid, params, metric)
            doc, code = analyze_report(cid, params, metric, seed, args.samples,
                                       args.tol_accept, args.tol_reject)
            if args.json:
                out.write(dumps(doc) + "\n")
            elif args.csv:
                rows = []
                _flatten("", doc, rows)
                out.write(_csv(["key", "value"], rows))
            else:
                out.write(_analyze_text(doc))
            return code
        doc, code = table1_report(seed, args.all, args.samples)
        if args.json:
            out.write(dumps(doc) + "\n")
        else:
            header, rows = _table1_rows(doc)
            if args.csv:
                out.write(_csv(header, rows))
            else:
                out.write(" ".join(header) + "\n")
                for r in rows:
                    out.write(" ".join(str(c) for c in r) + "\n")
        return code
    except UsageError as exc:
        print(f"gospace: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
