"""Command-line front end.

Every command takes its parameters from flags, then an optional ``--config``
JSON file, then built-in defaults (in that order of precedence).  Outputs go
to ``--out``, to ``$BINCLIQUE_OUT/<command>.<ext>`` when the variable is set,
or to stdout.  Each output starts with a comment (or a ``config`` field for
JSON) holding the resolved configuration.

Exit codes: 0 success, 1 an experiment or check failed, 2 bad configuration.
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import os
import random
import sys
from pathlib import Path

from . import comm, density, f2, pdt, proofs, triangles
from .cnf import (CnfFormula, encode_bin_clique, encode_block_clique, from_dimacs, tags_to_json,
                  to_dimacs)
from .graph import BlockGraph, derive_seed, graph_to_json, load_graph, sample_graph
from .stats import np_rng, rows_to_csv


class ConfigError(Exception):
    pass


# --- option tables ----------------------------------------------------------

GRAPH_OPTS = {"n": (int, None), "k": (int, None), "p": (float, None), "seed": (int, None),
              "graph": (str, None)}

COMMANDS: dict[str, dict] = {
    "sample-graph": {"opts": GRAPH_OPTS, "modes": None},
    "encode": {"opts": {**GRAPH_OPTS, "tags": (str, None)}, "modes": ("bin", "block")},
    "check-density": {"opts": {**GRAPH_OPTS, "alpha": (float, None), "beta": (float, None),
                               "R": (int, None), "s": (float, None), "bcn_mode": (str, "auto"),
                               "trials": (int, 1000), "budget": (int, 10 ** 8)},
                      "modes": ("ac", "bcn")},
    "concentration": {"opts": {"n": (int, None), "k": (int, None), "p": (float, None),
                               "seed": (int, None), "graphs": (int, 20), "tuples": (int, 5000),
                               "per_tuple": (bool, False)},
                      "modes": None},
    "walk": {"opts": {**GRAPH_OPTS, "M": (str, ""), "tree": (str, None), "depth": (int, 4),
                      "tree_seed": (int, None), "trials": (int, 1000), "alpha": (float, None),
                      "beta": (float, None), "R": (int, None), "tv_max": (float, 0.02)},
             "modes": ("simulate", "distribution", "success-rate")},
    "extract": {"opts": {**GRAPH_OPTS, "M": (str, ""), "tree": (str, None), "depth": (int, 2),
                         "tree_seed": (int, None), "R": (int, None)},
                "modes": None},
    "closure-test": {"opts": {"k": (int, 4), "m": (int, 2), "rows": (int, 3), "systems": (int, 100),
                              "seed": (int, None)},
                     "modes": None},
    "rank-prob": {"opts": {"n": (int, 16), "k": (int, 8), "rank": (int, None), "trials": (int, 10 ** 5),
                           "seed": (int, None), "allowed_frac": (float, 2 / 3)},
                  "modes": None},
    "bottleneck": {"opts": {"n": (int, 16), "seed": (int, None), "graph": (str, None),
                            "method": (str, "parity"), "p": (float, 0.5), "dag": (str, "random"),
                            "q": (float, 1.0), "node": (int, None), "s": (float, None),
                            "width_on": (str, "restricted")},
                   "modes": ("mu", "cover", "census")},
    "verify": {"opts": {"cnf": (str, None), "proof": (str, None), "var_budget": (int, 24)},
               "modes": ("cp", "rlin")},
    "translate": {"opts": {"cnf": (str, None), "proof": (str, None)},
                  "modes": ("cp-dag", "rlin-dag")},
    "comm": {"opts": {**GRAPH_OPTS, "protocol": (str, None), "random_depth": (int, None),
                      "gamma": (float, 0.9), "trials": (int, None), "s": (float, None)},
             "modes": ("check", "error", "census")},
}

RANDOMIZED = {"sample-graph", "concentration", "walk", "extract", "closure-test", "rank-prob",
              "bottleneck"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="binclique", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, spec in COMMANDS.items():
        sp = sub.add_parser(name)
        if spec["modes"]:
            sp.add_argument("mode", choices=spec["modes"])
        sp.add_argument("--config", help="JSON file with default parameters")
        sp.add_argument("--out", help="output file (default: $BINCLIQUE_OUT or stdout)")
        sp.add_argument("--threads", type=int, default=argparse.SUPPRESS)
        sp.add_argument("--timestamp", action="store_true", default=argparse.SUPPRESS,
                        help="add a generation-time comment (breaks byte reproducibility)")
        for opt, (typ, _) in spec["opts"].items():
            flag = "--" + opt.replace("_", "-")
            if typ is bool:
                sp.add_argument(flag, dest=opt, action="store_true", default=argparse.SUPPRESS)
            else:
                sp.add_argument(flag, dest=opt, type=typ, default=argparse.SUPPRESS)
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    spec = COMMANDS[args.command]
    cfg = {opt: default for opt, (_, default) in spec["opts"].items()}
    cfg.update(threads=1, timestamp=False)
    if args.config:
        try:
            file_cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(file_cfg, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(file_cfg) - set(cfg) - {"command", "mode"}
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        cfg.update({k: v for k, v in file_cfg.items() if k in cfg})
    for key, val in vars(args).items():
        if key in cfg:
            cfg[key] = val
    cfg["command"] = args.command
    if spec["modes"]:
        cfg["mode"] = args.mode
    if args.command in RANDOMIZED and cfg.get("seed") is None and not cfg.get("graph"):
        raise ConfigError(f"{args.command} needs an explicit --seed")
    if cfg["threads"] < 1:
        raise ConfigError("--threads must be positive")
    return cfg


def header_config(cfg: dict) -> dict:
    return {k: v for k, v in sorted(cfg.items()) if k not in ("timestamp", "threads")}


# --- output -----------------------------------------------------------------

def _comment(prefix: str, cfg: dict) -> str:
    lines = [f"{prefix} config {json.dumps(header_config(cfg), sort_keys=True)}"]
    if cfg.get("timestamp"):
        lines.append(f"{prefix} generated {datetime.datetime.now(datetime.timezone.utc).isoformat()}")
    return "\n".join(lines) + "\n"


def with_header(cfg: dict, body: str, fmt: str) -> str:
    if fmt == "json":
        doc = json.loads(body)
        doc = {"config": header_config(cfg), **{k: v for k, v in doc.items() if k != "config"}}
        if cfg.get("timestamp"):
            doc["generated"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
        return json.dumps(doc, sort_keys=False) + "\n"
    prefix = "c" if fmt == "cnf" else "#"
    return _comment(prefix, cfg) + body


def write_output(cfg: dict, text: str, ext: str, out) -> None:
    path = cfg.get("_out")
    if path is None and os.environ.get("BINCLIQUE_OUT"):
        name = cfg["command"] + (f"-{cfg['mode']}" if "mode" in cfg else "")
        path = str(Path(os.environ["BINCLIQUE_OUT"]) / f"{name}.{ext}")
    if path is None:
        out.write(text)
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text)


# --- shared loaders ---------------------------------------------------------

def _need(cfg, *keys):
    missing = [k for k in keys if cfg.get(k) is None]
    if missing:
        raise ConfigError("missing required option(s): " + ", ".join("--" + k.replace("_", "-") for k in missing))


def get_graph(cfg) -> BlockGraph:
    if cfg.get("graph"):
        try:
            return load_graph(cfg["graph"])
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigError(f"cannot load graph {cfg['graph']}: {exc}") from exc
    _need(cfg, "n", "k", "p", "seed")
    try:
        return sample_graph(cfg["n"], cfg["p"], cfg["k"], cfg["seed"], threads=cfg["threads"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def parse_vertex_set(text: str) -> list[tuple[int, int]]:
    out = []
    for part in filter(None, (t.strip() for t in text.split(","))):
        try:
            b, i = part.split(":")
            out.append((int(b), int(i)))
        except ValueError as exc:
            raise ConfigError(f"bad vertex {part!r}; use block:index") from exc
    return out


def get_instance(cfg):
    G = get_graph(cfg)
    try:
        return pdt.NonEdgeInstance(G, parse_vertex_set(cfg["M"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def get_tree(cfg, inst) -> pdt.Pdt:
    if cfg.get("tree"):
        try:
            T = pdt.pdt_from_sexpr(Path(cfg["tree"]).read_text())
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot load tree: {exc}") from exc
    else:
        seed = cfg["tree_seed"] if cfg.get("tree_seed") is not None else derive_seed(cfg["seed"], 0x7E)
        T = pdt.random_pdt(inst.k, inst.m, cfg["depth"], random.Random(seed), blocks=inst.free_blocks)
    try:
        inst.check_tree(T)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return T


def get_cnf(cfg) -> CnfFormula:
    _need(cfg, "cnf")
    try:
        return from_dimacs(Path(cfg["cnf"]).read_text())
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot load formula: {exc}") from exc


def get_proof(cfg, n):
    _need(cfg, "proof")
    try:
        return proofs.parse_proof(Path(cfg["proof"]).read_text(), n)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot load proof: {exc}") from exc


# --- commands ---------------------------------------------------------------

def cmd_sample_graph(cfg):
    G = get_graph(cfg)
    return graph_to_json(G), "json", None


def cmd_encode(cfg):
    G = get_graph(cfg)
    F = encode_block_clique(G) if cfg["mode"] == "block" else encode_bin_clique(G, G.k)
    if cfg.get("tags"):
        Path(cfg["tags"]).write_text(with_header(cfg, tags_to_json(F), "json"))
    return to_dimacs(F), "cnf", None


def cmd_check_density(cfg):
    G = get_graph(cfg)
    if cfg["mode"] == "ac":
        rep = density.min_almost_complete(G)
        thr = density.almost_complete_threshold(G.n, G.k, cfg["p"]) if cfg.get("p") is not None else None
        doc = {"s_star": rep.s_star, "witness": list(rep.witness) if rep.witness else None,
               "threshold_natural_log": thr}
        fail = None
        if cfg.get("s") is not None and rep.s_star > cfg["s"]:
            fail = f"s_star = {rep.s_star} exceeds s = {cfg['s']}"
        return json.dumps(doc), "json", fail
    _need(cfg, "alpha", "beta", "R")
    mode = cfg["bcn_mode"]
    if mode not in ("auto", "exhaustive", "sampled"):
        raise ConfigError("--bcn-mode must be auto, exhaustive or sampled")
    if mode == "sampled" or (mode == "auto" and density.exhaustive_cost(G, cfg["R"]) > cfg["budget"]):
        _need(cfg, "seed")
    try:
        rep = density.check_bounded_cn(G, cfg["alpha"], cfg["beta"], cfg["R"], mode=mode,
                                       trials=cfg["trials"], seed=cfg.get("seed"), budget=cfg["budget"])
    except triangles.BudgetExceeded as exc:
        raise ConfigError(str(exc)) from exc
    doc = {"alpha": rep.alpha, "beta": rep.beta, "R": rep.R, "passed": rep.passed,
           "coverage": rep.coverage, "checked": rep.checked,
           "counterexample": None if rep.counterexample is None else
           {"S": list(rep.counterexample[0]), "block": rep.counterexample[1], "size": rep.counterexample[2]},
           "max_deviation": rep.max_deviation}
    return json.dumps(doc), "json", None if rep.passed else "bounded common neighbourhood check failed"


def cmd_concentration(cfg):
    _need(cfg, "n", "k", "p", "seed")
    try:
        exp = density.concentration_experiment_ac(cfg["n"], cfg["p"], cfg["k"], cfg["graphs"],
                                                  cfg["tuples"], cfg["seed"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    fail = None if exp.within_reference() else "tail frequency exceeds the Chernoff reference"
    return exp.to_csv(per_tuple=cfg["per_tuple"]), "csv", fail


def cmd_walk(cfg):
    inst = get_instance(cfg)
    T = get_tree(cfg, inst)
    seed = cfg.get("seed")
    _need(cfg, "seed")
    if cfg["mode"] == "simulate":
        tr = pdt.simulate_walk(inst, T, random.Random(derive_seed(seed, 0x3A)), trace=True)
        problems = [] if tr.failed else pdt.check_simulation_properties(inst, tr)
        doc = json.loads(tr.to_json())
        doc["tree"] = pdt.pdt_to_sexpr(T, inst.k * inst.m)
        doc["property_problems"] = problems
        return json.dumps(doc), "json", "; ".join(problems) or None
    if cfg["mode"] == "distribution":
        rep = pdt.walk_distribution_test(inst, T, cfg["trials"], seed)
        rows = [{"leaf": p or "root", "walk": f"{rep.walk[p]:.6f}", "direct": f"{rep.direct[p]:.6f}"}
                for p in sorted(rep.walk)]
        text = rows_to_csv(rows, comments=[f"tv {rep.tv:.6f} trials {rep.trials}"])
        fail = f"total variation {rep.tv:.4f} above {cfg['tv_max']}" if rep.tv > cfg["tv_max"] else None
        return text, "csv", fail
    _need(cfg, "alpha", "R")
    beta = cfg["beta"]
    if beta is None:
        beta = density.measure_beta(inst.G, cfg["alpha"], cfg["R"], 1000, derive_seed(seed, 0xBE))
    try:
        rep = pdt.success_rate(inst, T, cfg["trials"], seed, cfg["alpha"], beta, cfg["R"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    row = {"experiment_id": "walk-success", "n": inst.n, "k": inst.k, "p": inst.G.meta.get("p"),
           "depth": rep.depth, "alpha": cfg["alpha"], "beta": beta, "R": cfg["R"],
           "empirical_value": rep.empirical, "reference_bound": rep.reference, "sigma": rep.sigma,
           "overrun": rep.overrun, "overrun_bound": rep.overrun_bound, "trials": rep.trials,
           "seed": seed}
    fail = None
    if rep.violation:
        fail = "success rate below the reference"
    elif not rep.overrun_ok:
        fail = "loop overrun frequency above exp(-d/4)"
    return rows_to_csv([row]), "csv", fail


def cmd_extract(cfg):
    inst = get_instance(cfg)
    T = get_tree(cfg, inst)
    _need(cfg, "seed")
    tr = pdt.simulate_walk(inst, T, random.Random(derive_seed(cfg["seed"], 0x3A)))
    doc = {"walk": json.loads(tr.to_json())}
    if tr.failed:
        doc["result"] = "walk failed"
        return json.dumps(doc), "json", "walk returned FAIL"
    psi = f2.LinearSystem(inst.k, inst.m, tuple(tr.path_constraints))
    doc["psi"] = psi.to_text()
    try:
        ext = pdt.extract_restriction(inst, tr, psi, cfg.get("R"))
    except pdt.ExtractionInfeasible as exc:
        doc["result"] = f"infeasible: {exc}"
        return json.dumps(doc), "json", str(exc)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    problems = pdt.check_extraction(inst, psi, ext)
    doc.update(result="ok" if not problems else "violated", problems=problems,
               free=sorted(ext.free), fixed=sorted(ext.fixed), closure=sorted(ext.closure),
               M_prime=list(ext.M_prime),
               restriction={str(v): [str(mask), c] for v, (mask, c) in sorted(ext.rho.subst.items())})
    return json.dumps(doc), "json", "; ".join(problems) or None


def cmd_closure_test(cfg):
    _need(cfg, "seed")
    k, m = cfg["k"], cfg["m"]
    rows, fail = [], None
    for t in range(cfg["systems"]):
        sys_ = f2.random_system(k, m, cfg["rows"], np_rng(cfg["seed"], t))
        forms = f2.independent_subset(sys_.forms())
        cl = f2.closure(forms, k, m)
        rest = f2.independent_subset(sys_.zero_blocks(cl).forms())
        rest_safe = f2.is_safe(rest, k, m)
        bound_ok = len(cl) + len(rest) <= len(forms)
        rows.append({"system": t, "rank": len(forms), "safe": int(f2.is_safe(forms, k, m)),
                     "closure": " ".join(map(str, sorted(cl))), "rest_rank": len(rest),
                     "rest_safe": int(rest_safe), "dimension_bound": int(bound_ok)})
        if not (rest_safe and bound_ok) and fail is None:
            fail = f"system {t}: closure does not make the system safe or breaks the dimension bound"
    return rows_to_csv(rows), "csv", fail


def cmd_rank_prob(cfg):
    _need(cfg, "seed", "rank")
    n, k = cfg["n"], cfg["k"]
    m = int(round(math.log2(n)))
    if 1 << m != n:
        raise ConfigError("n must be a power of 2")
    rng = random.Random(derive_seed(cfg["seed"], 1))
    size = math.ceil(cfg["allowed_frac"] * n)
    if size < 2 * n / 3:
        raise ConfigError("allowed sets must hold at least 2n/3 vertices")
    allowed = [sorted(rng.sample(range(n), size)) for _ in range(k)]
    try:
        sys_ = f2.random_system(k, m, cfg["rank"], np_rng(cfg["seed"], 2), rank=cfg["rank"])
        res = f2.rank_probability_experiment(sys_, allowed, cfg["trials"], cfg["seed"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    row = {"experiment_id": "rank-probability", "n": n, "k": k, "rank": res.rank,
           "empirical_value": res.empirical, "reference_bound": res.bound, "sigma": res.sigma,
           "trials": res.trials, "seed": cfg["seed"]}
    return rows_to_csv([row]), "csv", None if res.passed else "satisfaction frequency above (3/4)^r"


def _bottleneck_setup(cfg):
    if cfg.get("graph"):
        G = get_graph(cfg)
    else:
        _need(cfg, "seed")
        try:
            G = triangles.triangle_free_graph(cfg["n"], cfg["seed"], cfg["method"], cfg["p"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    try:
        split = triangles.CliqueSplit(G)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if triangles.has_transversal_clique(G):
        raise ConfigError("graph has a transversal clique; the search problem has no refutation")
    if cfg["dag"] == "random":
        seed = cfg["seed"] if cfg.get("seed") is not None else 0
        dag = triangles.random_triangle_dag(split, seed)
    elif cfg["dag"] == "cp":
        dag = triangles.cp_triangle_dag_for_graph(G)[0]
    else:
        raise ConfigError("--dag must be random or cp")
    return G, split, dag


def cmd_bottleneck(cfg):
    G, split, dag = _bottleneck_setup(cfg)
    q = cfg["q"]
    if cfg["width_on"] not in ("restricted", "full"):
        raise ConfigError("--width-on must be restricted or full")
    mu = triangles.build_mu(dag, split, q, width_on=cfg["width_on"])
    if cfg["mode"] == "mu":
        per_node: dict[int, list[int]] = {}
        for z, u in mu.mu_x.items():
            per_node.setdefault(u, [0, 0])[0] += 1
        for z, u in mu.mu_y.items():
            per_node.setdefault(u, [0, 0])[1] += 1
        rows = [{"node": u, "assigned_x": a, "assigned_y": b} for u, (a, b) in sorted(per_node.items())]
        s = density.min_almost_complete(G).s_star
        comments = [f"nodes {len(dag)} assigned {mu.assigned} of {mu.domain} q {q} s {s}",
                    f"claim_violations {len(mu.claim_violations)}"]
        fail = f"{len(mu.claim_violations)} survivors break the 2q claim" if mu.claim_violations else None
        return rows_to_csv(rows, ["node", "assigned_x", "assigned_y"], comments), "csv", fail
    node = cfg.get("node")
    if node is None:
        node = max(range(len(dag)), key=lambda u: (int(triangles.restricted_triangle(dag, mu, u).sum()), -u))
    if not 0 <= node < len(dag):
        raise ConfigError(f"node {node} out of range")
    Tp = triangles.restricted_triangle(dag, mu, node)
    try:
        tree = triangles.covering_tree(split, Tp, q)
    except ValueError as exc:
        return json.dumps({"node": node, "error": str(exc)}), "json", str(exc)
    if cfg["mode"] == "cover":
        audit = triangles.audit_covering_tree(split, tree)
        doc = {"node": node, "size": len(tree),
               "audit": {"coverage": audit.coverage, "nesting": audit.nesting,
                         "unique_paths": audit.unique_paths, "out_degree": audit.out_degree},
               "tree": [{"parent": nd.parent, "label": list(nd.label) if nd.label else None,
                         "blocks": sorted(nd.blocks), "y": nd.y, "size": int(nd.mem.sum())}
                        for nd in tree.nodes]}
        return json.dumps(doc), "json", None if audit.ok else "covering tree audit failed"
    s = cfg["s"] if cfg.get("s") is not None else density.min_almost_complete(G).s_star
    census = triangles.block_depth_census(tree, G.n, s)
    text = census.to_csv()
    return text, "csv", "census exceeds the size bound" if census.flagged else None


def cmd_verify(cfg):
    F = get_cnf(cfg)
    P = get_proof(cfg, F.num_vars)
    try:
        if cfg["mode"] == "cp":
            if not isinstance(P, proofs.CpProof):
                raise ConfigError("proof file does not hold cutting-planes lines")
            length = proofs.verify_cp(proofs.cnf_to_inequalities(F), P, cfg["var_budget"])
            return f"Ok length={length}\n", "txt", None
        if not isinstance(P, proofs.ResPlusProof):
            raise ConfigError("proof file does not hold rlin lines")
        length, depth = proofs.verify_resplus(F, P, cfg["var_budget"])
        return f"Ok length={length} depth={depth}\n", "txt", None
    except proofs.ProofError as exc:
        return f"Err step={exc.step} reason={exc.reason}\n", "txt", str(exc)


def cmd_translate(cfg):
    F = get_cnf(cfg)
    P = get_proof(cfg, F.num_vars)
    try:
        if cfg["mode"] == "cp-dag":
            if not isinstance(P, proofs.CpProof):
                raise ConfigError("proof file does not hold cutting-planes lines")
            axioms = proofs.cnf_to_inequalities(F)
            proofs.verify_cp(axioms, P)
            half = F.bits // 2
            xv = [i * F.bits + a for i in range(F.columns) for a in range(half)]
            yv = [i * F.bits + a for i in range(F.columns) for a in range(half, F.bits)]
            dag = triangles.cp_to_triangle_dag(axioms, P, xv, yv)
            dag.validate(triangles.axiom_preimage(axioms, xv, yv))
            return dag.to_json(), "json", None
        if not isinstance(P, proofs.ResPlusProof):
            raise ConfigError("proof file does not hold rlin lines")
        proofs.verify_resplus(F, P)
        D = proofs.resplus_to_affine_dag(F, P)
        D.validate(F)
        doc = {"n": D.n, "root": D.root, "depth": D.depth(),
               "nodes": [{"space": s.to_text(), "children": list(E[:2]),
                          "query": str(E[2]) if len(E) == 3 else None, "output": o}
                         for s, E, o in zip(D.spaces, D.edges, D.outputs)]}
        return json.dumps(doc), "json", None
    except proofs.ProofError as exc:
        return json.dumps({"error": str(exc)}), "json", str(exc)


def cmd_comm(cfg):
    G = get_graph(cfg)
    try:
        split = triangles.CliqueSplit(G)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.get("protocol"):
        try:
            P = comm.protocol_from_json(Path(cfg["protocol"]).read_text())
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigError(f"cannot load protocol: {exc}") from exc
    elif cfg.get("random_depth") is not None:
        _need(cfg, "seed")
        P = comm.random_subcube_protocol(G.k, split.h, cfg["random_depth"], derive_seed(cfg["seed"], 0xC1))
    else:
        P = comm.baseline_protocol(split)
    problems = P.audit()
    if problems:
        raise ConfigError("; ".join(problems))
    if cfg["mode"] == "check":
        rows = []
        for path, _ in sorted(P.nodes()):
            X, Y = P.rects[path]
            if not X.any() or not Y.any():
                continue
            try:
                rep = comm.subcube_like_check(X, Y, P.K, cfg["gamma"])
                verdict = "pass" if rep.passed else f"fail {rep.violation[0]}{list(rep.violation[1])}"
                fx, fy = rep.fix_x, rep.fix_y
            except triangles.BudgetExceeded:
                verdict, fx, fy = "budget", (), ()
            rows.append({"node": path or "root", "fix_x": " ".join(map(str, fx)),
                         "fix_y": " ".join(map(str, fy)), "verdict": verdict})
        return rows_to_csv(rows, ["node", "fix_x", "fix_y", "verdict"]), "csv", None
    if cfg["mode"] == "error":
        exact = comm.distributional_error(P, split)
        row = {"exact_error": exact.error}
        fail = None
        if cfg.get("trials"):
            _need(cfg, "seed")
            est = comm.distributional_error(P, split, cfg["trials"], cfg["seed"])
            row.update(sampled_error=est.error, sigma=est.sigma, trials=est.trials)
            if abs(est.error - exact.error) > 3 * max(est.sigma, 1 / cfg["trials"]):
                fail = "sampled error deviates from the exhaustive value by more than 3 sigma"
        return rows_to_csv([row]), "csv", fail
    s = None if cfg.get("s") is None else int(cfg["s"])
    census = comm.leaf_census(P, split, s=s, gamma=cfg["gamma"])
    fail = f"{len(census.violations)} leaves exceed s*|Sigma|^-gamma" if census.violations else None
    return census.to_csv([f"s {census.s} gamma {census.gamma}"]), "csv", fail


HANDLERS = {"sample-graph": cmd_sample_graph, "encode": cmd_encode, "check-density": cmd_check_density,
            "concentration": cmd_concentration, "walk": cmd_walk, "extract": cmd_extract,
            "closure-test": cmd_closure_test, "rank-prob": cmd_rank_prob, "bottleneck": cmd_bottleneck,
            "verify": cmd_verify, "translate": cmd_translate, "comm": cmd_comm}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        cfg = resolve_config(args)
        run_cfg = {**cfg, "_out": args.out}
        body, fmt, fail = HANDLERS[args.command](run_cfg)
    except ConfigError as exc:
        print(f"binclique: error: {exc}", file=sys.stderr)
        return 2
    write_output(run_cfg, with_header(cfg, body, fmt), fmt, out)
    if fail:
        print(f"binclique: check failed: {fail}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
