"""Command-line entry point.

Every invocation prints one JSON run record on stdout (or writes it to
``--out``); progress and diagnostics go to stderr.  Vertex ids on the
command line and in records are 1-based, matching the graph file format.

Exit codes: 0 success, 1 a check failed, 2 usage or input error,
3 solver node cap reached.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from mdkit import __version__, formats
from mdkit.graph import Graph, GraphError
from mdkit.harness import (
    default_node_cap,
    xval_kernel,
    xval_nae,
    xval_sat,
)
from mdkit.kernel import KernelError, Mode, Modulator, find_modulator, kernelize
from mdkit.nae import NaeError, build_nae_gadget, check_distance_claims, fvs_witness
from mdkit.resolve import SolverBudgetExceeded, is_resolving_set, metric_dimension_exact
from mdkit.sat import (
    CnfError,
    build_clique_gadget,
    build_vc_gadget,
    check_table1,
    clique_modulator_witness,
    parse_dimacs_cnf,
    vc_witness,
)

log = logging.getLogger("mdkit")

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class _Run:
    """Collects input hashes for the run record."""

    def __init__(self):
        self.input_hashes: dict[str, str] = {}

    def read(self, path: str) -> str:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc.strerror}") from None
        self.input_hashes[path] = formats.sha256_hex(text)
        return text

    def graph(self, path: str) -> Graph:
        return formats.read_graph(self.read(path))


def _one_based(vs) -> list[int]:
    return [v + 1 for v in vs]


def _parse_ids(text: str, n: int) -> list[int]:
    out = []
    for tok in text.replace(" ", "").split(","):
        if not tok:
            continue
        try:
            v = int(tok)
        except ValueError:
            raise UsageError(f"bad vertex id {tok!r}") from None
        if not 1 <= v <= n:
            raise UsageError(f"vertex id {v} outside 1..{n}")
        out.append(v - 1)
    return out


def _mode(text: str) -> Mode:
    return Mode.CLUSTER if text == "cluster" else Mode.CO_CLUSTER


# --------------------------------------------------------------------------
# subcommands; each returns (exit code, outcome payload)


def cmd_gen(args, run: _Run):
    if args.kind == "nae":
        text = run.read(args.input)
        inst = formats.read_nae(text)
        art = build_nae_gadget(inst)
        meta = {
            "k": art.k,
            "fvs_witness": _one_based(fvs_witness(art)),
            "instance": formats.nae_record(inst),
            "unused_variables": inst.unused_variables(),
        }
    else:
        text = run.read(args.cnf)
        f = parse_dimacs_cnf(text)
        if args.kind == "sat-vc":
            art = build_vc_gadget(f)
            meta = {"vc_witness": _one_based(vc_witness(art))}
        else:
            art = build_clique_gadget(f)
            meta = {"clique_modulator": _one_based(clique_modulator_witness(art))}
        meta.update(k=art.k, alpha=art.alpha, variant=art.variant)
    meta.update(generator=f"mdkit {__version__}", input_sha256=formats.sha256_hex(text))
    files = formats.write_bundle(args.out_dir, art.graph, meta)
    return EXIT_OK, {"vertices": art.graph.n, "edges": art.graph.m, "k": art.k, "files": files}


def cmd_md(args, run: _Run):
    g = run.graph(args.graph)
    cap = args.node_cap if args.node_cap is not None else default_node_cap()
    res = metric_dimension_exact(g, bound=args.k, node_cap=cap)
    rec = res.to_record()
    rec["certificate"] = _one_based(rec["certificate"])
    return EXIT_OK, rec


def cmd_verify(args, run: _Run):
    g = run.graph(args.graph)
    s = _parse_ids(args.set, g.n)
    cert = is_resolving_set(g, s)
    rec = cert.to_record()
    rec["vertices"] = _one_based(rec["vertices"])
    if rec["witness_pair"] is not None:
        rec["witness_pair"] = _one_based(rec["witness_pair"])
    return (EXIT_OK if cert.verified else EXIT_CHECK_FAILED), rec


def cmd_kernelize(args, run: _Run):
    g = run.graph(args.graph)
    mode = _mode(args.mode)
    x = None
    if args.modulator is not None:
        x = Modulator.of(_parse_ids(args.modulator, g.n), mode)
    res = kernelize(g, args.k, x, mode, args.modulator_budget)
    rec = {
        "outcome": res.outcome,
        "k": res.k,
        "vertices": res.graph.n,
        "size_bound": res.size_bound,
        "trace": res.trace.to_record(),
        "modulator": _one_based(res.modulator.vertices),
    }
    for step in rec["trace"]["steps"]:
        step["removed"] = _one_based(step["removed"])
    if args.out_dir:
        out = Path(args.out_dir)
        meta = {
            "k": res.k,
            "outcome": res.outcome,
            "modulator": _one_based(res.modulator.vertices),
            "original_ids": _one_based(res.original_ids),
            "input_sha256": run.input_hashes[args.graph],
            "generator": f"mdkit {__version__}",
        }
        files = formats.write_bundle(out, res.graph, meta)
        (out / "trace.json").write_text(formats.write_trace(res.trace))
        files["trace"] = str(out / "trace.json")
        rec["files"] = dict(sorted(files.items()))
    return EXIT_OK, rec


def cmd_modulator(args, run: _Run):
    g = run.graph(args.graph)
    x = find_modulator(g, args.budget, _mode(args.mode))
    if x is None:
        return EXIT_OK, {"found": False, "vertices": None}
    return EXIT_OK, {"found": True, "vertices": _one_based(x.vertices), "size": len(x.vertices)}


def cmd_check(args, run: _Run):
    if args.what == "claims-nae":
        inst = formats.read_nae(run.read(args.input))
        report = check_distance_claims(build_nae_gadget(inst))
    else:
        f = parse_dimacs_cnf(run.read(args.cnf))
        art = build_vc_gadget(f) if args.variant == "vc" else build_clique_gadget(f)
        report = check_table1(art)
    rec = report.to_record()
    return (EXIT_OK if report.ok else EXIT_CHECK_FAILED), rec


def cmd_xval(args, run: _Run):
    failure_dir = Path(args.failure_dir)
    if args.what == "sat":
        report = xval_sat(args.n, args.m_max, args.samples, args.seed, args.variant,
                          default_node_cap(), failure_dir)
    elif args.what == "nae":
        report = xval_nae(args.d, args.vars, args.clauses, args.samples, args.seed, failure_dir)
    else:
        report = xval_kernel(args.planted_x, args.samples, args.seed, _mode(args.mode),
                             default_node_cap(), failure_dir)
    for rec in report.records:
        if rec["verdict"] != "PASS":
            log.warning("sample %d: %s", rec["index"], rec["verdict"])
    code = EXIT_OK
    if report.failures:
        code = EXIT_CHECK_FAILED
    elif report.indeterminate:
        code = EXIT_CAP
    return code, {"summary": report.summary(), "samples": report.records}


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mdkit", description="Metric dimension reductions, solver and kernel.")
    p.add_argument("--out", help="write the run record here instead of stdout")
    p.add_argument("--version", action="version", version=f"mdkit {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", help="build a reduction gadget")
    gsub = gen.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    g_nae = gsub.add_parser("nae")
    g_nae.add_argument("--in", dest="input", required=True)
    g_nae.add_argument("--out-dir", required=True)
    for kind in ("sat-vc", "sat-clique"):
        gs = gsub.add_parser(kind)
        gs.add_argument("--cnf", required=True)
        gs.add_argument("--out-dir", required=True)
    gen.set_defaults(func=cmd_gen)

    md = sub.add_parser("md", help="exact metric dimension")
    md.add_argument("--graph", required=True)
    md.add_argument("--k", type=int)
    md.add_argument("--node-cap", type=int)
    md.set_defaults(func=cmd_md)

    ver = sub.add_parser("verify", help="check a resolving set")
    ver.add_argument("--graph", required=True)
    ver.add_argument("--set", required=True)
    ver.set_defaults(func=cmd_verify)

    ker = sub.add_parser("kernelize", help="apply the reduction rules")
    ker.add_argument("--graph", required=True)
    ker.add_argument("--k", type=int, required=True)
    grp = ker.add_mutually_exclusive_group()
    grp.add_argument("--modulator")
    grp.add_argument("--modulator-budget", type=int, default=10)
    ker.add_argument("--mode", choices=["cluster", "co-cluster"], default="cluster")
    ker.add_argument("--out-dir")
    ker.set_defaults(func=cmd_kernelize)

    mod = sub.add_parser("modulator", help="search for a small modulator")
    mod.add_argument("--graph", required=True)
    mod.add_argument("--budget", type=int, required=True)
    mod.add_argument("--mode", choices=["cluster", "co-cluster"], default="cluster")
    mod.set_defaults(func=cmd_modulator)

    chk = sub.add_parser("check", help="verify distance tables of a gadget")
    csub = chk.add_subparsers(dest="what", required=True, parser_class=_Parser)
    c_nae = csub.add_parser("claims-nae")
    c_nae.add_argument("--in", dest="input", required=True)
    c_t1 = csub.add_parser("table1")
    c_t1.add_argument("--cnf", required=True)
    c_t1.add_argument("--variant", choices=["vc", "clique"], default="vc")
    chk.set_defaults(func=cmd_check)

    xv = sub.add_parser("xval", help="seeded cross-validation")
    xsub = xv.add_subparsers(dest="what", required=True, parser_class=_Parser)
    x_sat = xsub.add_parser("sat")
    x_sat.add_argument("--n", type=int, required=True)
    x_sat.add_argument("--m-max", type=int, required=True)
    x_sat.add_argument("--variant", choices=["vc", "clique"], default="vc")
    x_nae = xsub.add_parser("nae")
    x_nae.add_argument("--d", type=int, required=True)
    x_nae.add_argument("--vars", type=int, required=True)
    x_nae.add_argument("--clauses", type=int, required=True)
    x_ker = xsub.add_parser("kernel")
    x_ker.add_argument("--planted-x", type=int, choices=[0, 1], required=True)
    x_ker.add_argument("--mode", choices=["cluster", "co-cluster"], default="cluster")
    for x in (x_sat, x_nae, x_ker):
        x.add_argument("--samples", type=int, required=True)
        x.add_argument("--seed", type=int, required=True)
        x.add_argument("--failure-dir", default="xval-failures",
                       help="where bundles of failing samples are written")
    xv.set_defaults(func=cmd_xval)
    return p


def _seed_of(args) -> int | None:
    return getattr(args, "seed", None)


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="mdkit: %(message)s", stream=sys.stderr)
    argv = sys.argv[1:] if argv is None else argv
    run = _Run()
    start = time.perf_counter()
    args = None
    out_path = None
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        out_path = args.out
        code, outcome = args.func(args, run)
    except UsageError as exc:
        log.error("%s", exc)
        code, outcome = EXIT_USAGE, {"error": str(exc)}
    except (formats.FormatError, CnfError, NaeError, KernelError, GraphError, ValueError) as exc:
        log.error("%s", exc)
        code, outcome = EXIT_USAGE, {"error": str(exc)}
    except SolverBudgetExceeded as exc:
        log.error("%s", exc)
        code, outcome = EXIT_CAP, {"status": "INDETERMINATE", "explored_nodes": exc.explored, "cap": exc.cap}
    record = {
        "command": argv[0] if argv else None,
        "argv": list(argv),
        "input_hashes": run.input_hashes,
        "seed": None if args is None else _seed_of(args),
        "wall_time": round(time.perf_counter() - start, 6),
        "exit_code": code,
        "outcome": outcome,
    }
    text = formats.canonical_json(record) + "\n"
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
