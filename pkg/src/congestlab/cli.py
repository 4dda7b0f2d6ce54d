"""Command-line experiment runner.

Every command emits records that carry their seed; output is deterministic
for a fixed configuration. Exit codes: 0 success, 2 configuration error,
3 invariant fault.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from congestlab.clique.girth import GirthTrace, girth_plus_one
from congestlab.clique.listing import detect_c2k, list_subgraph
from congestlab.congest import thresholds as th
from congestlab.congest.detect import (
    SampleMode,
    SimulationBudgetExceeded,
    detect_c2k_congest,
    detect_heavy_c2k,
    detect_light_c2k,
)
from congestlab.congest.girth import exact_girth_congest
from congestlab.congest.reduction import (
    EarlyFound,
    build_reduction_graph,
    directed_triangles,
    prune_high_degree,
    reduce_c6_to_directed_triangles,
    well_colored_c6,
)
from congestlab.engine import InvariantFault
from congestlab import graph as gr
from congestlab.graph import Graph, GraphFormatError, SubgraphPattern
from congestlab.oracles import MAX_ORACLE_PATTERN, brute_girth, enumerate_cycles, enumerate_subgraph

EXIT_OK, EXIT_CONFIG, EXIT_FAULT = 0, 2, 3


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------- graph sources


def _kv(body: str) -> dict[str, str]:
    out = {}
    if not body:
        return out
    for part in body.split(","):
        if "=" not in part:
            raise ConfigError(f"generator parameter {part!r} is not key=value")
        key, val = part.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def _int(params: dict[str, str], key: str, default: int | None = None) -> int:
    if key not in params:
        if default is None:
            raise ConfigError(f"generator needs {key}=")
        return default
    try:
        return int(params[key])
    except ValueError:
        raise ConfigError(f"{key} must be an integer") from None


def _float(params: dict[str, str], key: str) -> float:
    try:
        return float(params[key])
    except KeyError:
        raise ConfigError(f"generator needs {key}=") from None
    except ValueError:
        raise ConfigError(f"{key} must be a number") from None


def generate(spec: str, seed: int) -> Graph:
    """Build a graph from a spec such as ``er:n=64,p=0.2`` or ``petersen``."""
    name, _, body = spec.partition(":")
    p = _kv(body)
    name = name.strip().lower()
    if name == "er":
        return gr.gen_random(_int(p, "n"), _float(p, "p"), seed)
    if name == "cycle":
        return gr.pad(gr.cycle_graph(_int(p, "len", _int(p, "n"))), _int(p, "n"))
    if name == "complete":
        return gr.complete_graph(_int(p, "n"))
    if name == "path":
        return gr.path_graph(_int(p, "n"))
    if name == "star":
        return gr.star_graph(_int(p, "leaves"))
    if name == "petersen":
        return gr.petersen_graph()
    if name == "tree":
        return gr.random_tree(_int(p, "n"), seed)
    if name == "bipartite":
        return gr.complete_bipartite(_int(p, "a"), _int(p, "b"))
    if name == "bounded":
        return gr.gen_bounded_degree(_int(p, "n"), _int(p, "d"), seed)
    if name == "girth":
        g, _ = gr.planted_girth_graph(
            _int(p, "n"),
            _int(p, "g"),
            seed,
            extra_edges=_int(p, "extra", 0),
            hub_leaves=_int(p, "hub", 0),
            hubs=_int(p, "hubs", 1),
        )
        return g
    if name == "plant":
        base = gr.gen_random(_int(p, "n"), _float(p, "p"), seed) if "p" in p else gr.empty_graph(_int(p, "n"))
        g, _ = gr.plant_cycle(base, _int(p, "len"), seed)
        return g
    raise ConfigError(f"unknown generator {name!r}")


# ---------------------------------------------------------------- configuration


@dataclass
class ExperimentConfig:
    command: str
    graph: str | None
    gen: str | None
    seed: int
    trials: int
    k: int | None = None
    mode: str = "god"
    detector: str = "both"
    pattern: str | None = None
    out: str | None = None
    fmt: str = "json"
    workers: int = 1
    extra: dict = field(default_factory=dict)

    def graph_for(self, trial: int) -> tuple[Graph, int]:
        seed = self.seed + trial
        if self.graph:
            try:
                return Graph.read(self.graph), seed
            except OSError as exc:
                raise ConfigError(f"cannot read graph file: {exc}") from None
        if self.gen:
            return generate(self.gen, seed), seed
        raise ConfigError("one of --graph or --gen is required")


def _base(cfg: ExperimentConfig, g: Graph, seed: int, trial: int) -> dict:
    return {"command": cfg.command, "trial": trial, "seed": seed, "n": g.n, "m": g.m}


def _girth_str(x) -> str:
    return str(x)


# ---------------------------------------------------------------- commands


def cmd_girth_approx(cfg: ExperimentConfig, trial: int) -> dict:
    g, seed = cfg.graph_for(trial)
    trace = GirthTrace()
    est = girth_plus_one(g, trace=trace)
    oracle = brute_girth(g)
    rec = _base(cfg, g, seed, trial)
    rec.update(
        estimate=str(est),
        oracle=_girth_str(oracle),
        consistent=est.consistent_with(oracle),
        rounds=trace.metrics.rounds,
        words=trace.metrics.words_total,
        primitive_calls=trace.primitive_calls,
    )
    return rec


def _pattern(cfg: ExperimentConfig) -> SubgraphPattern:
    if not cfg.pattern:
        raise ConfigError("--pattern is required")
    pat = SubgraphPattern.parse(cfg.pattern)
    if pat.p > MAX_ORACLE_PATTERN:
        raise ConfigError(f"pattern has {pat.p} nodes; the oracle handles at most {MAX_ORACLE_PATTERN}")
    return pat


def cmd_list(cfg: ExperimentConfig, trial: int) -> dict:
    g, seed = cfg.graph_for(trial)
    pat = _pattern(cfg)
    rep = list_subgraph(g, pat, report=True)
    expected = enumerate_subgraph(g, pat)
    rec = _base(cfg, g, seed, trial)
    rec.update(
        pattern=pat.name or cfg.pattern,
        count=len(rep.instances),
        oracle_count=len(expected),
        match=rep.instances == expected,
        rounds=rep.metrics.rounds,
        words=rep.metrics.words_total,
    )
    return rec


def _k(cfg: ExperimentConfig, allowed: tuple[int, ...] | None = None) -> int:
    if cfg.k is None:
        raise ConfigError("--k is required")
    if allowed is not None and cfg.k not in allowed:
        raise ConfigError(f"--k must be one of {allowed}")
    if cfg.k < 2:
        raise ConfigError("--k must be >= 2")
    return cfg.k


def cmd_detect_clique(cfg: ExperimentConfig, trial: int) -> dict:
    g, seed = cfg.graph_for(trial)
    k = _k(cfg)
    res = detect_c2k(g, k)
    rec = _base(cfg, g, seed, trial)
    rec.update(
        k=k,
        result=res.kind.value,
        witness=list(res.witness.vertices) if res.witness else None,
        oracle_has_cycle=bool(enumerate_cycles(g, 2 * k, 1)),
    )
    return rec


def cmd_detect_congest(cfg: ExperimentConfig, trial: int) -> dict:
    g, seed = cfg.graph_for(trial)
    k = _k(cfg, th.K_RANGE)
    mode = SampleMode(cfg.mode)
    if cfg.detector == "light":
        rep = detect_light_c2k(g, k, seed=seed)
    elif cfg.detector == "heavy":
        rep = detect_heavy_c2k(g, k, mode=mode, seed=seed)
    else:
        rep = detect_c2k_congest(g, k, seed=seed, mode=mode)
    rec = _base(cfg, g, seed, trial)
    rec.update(
        k=k,
        detector=cfg.detector,
        mode=mode.value,
        found=rep.found,
        validated=bool(rep.witness and gr.validate_witness(g, rep.witness, 2 * k)) if rep.found else True,
        found_by=rep.found_by,
        witness=list(rep.witness.vertices) if rep.witness else None,
        rounds=rep.rounds,
        simulated_runs=rep.simulated,
        skipped_runs=rep.skipped,
    )
    return rec


def cmd_girth_congest(cfg: ExperimentConfig, trial: int) -> dict:
    g, seed = cfg.graph_for(trial)
    res = exact_girth_congest(g, seed=seed)
    oracle = brute_girth(g)
    rec = _base(cfg, g, seed, trial)
    rec.update(
        girth=_girth_str(res.girth),
        oracle=_girth_str(oracle),
        halted_phase=res.halted_phase,
        fallback=res.fallback,
        rounds=res.rounds,
        phases=";".join(f"{p.k}:{p.halted_by or '-'}" for p in res.trace),
        witness=list(res.witness.vertices) if res.witness else None,
    )
    return rec


def cmd_reduce(cfg: ExperimentConfig, trial: int) -> dict:
    g, seed = cfg.graph_for(trial)
    rec = _base(cfg, g, seed, trial)
    colors_arg = cfg.extra.get("colors")
    iterations = cfg.extra.get("iterations")
    if colors_arg is not None:
        try:
            colors = [int(c) % 6 for c in colors_arg.split(",")]
        except ValueError:
            raise ConfigError("--colors must be comma-separated integers") from None
        if len(colors) != g.n:
            raise ConfigError(f"--colors needs {g.n} values")
        pruned, _ = prune_high_degree(g)
        dg = build_reduction_graph(pruned, colors)
        early = None
    else:
        res = reduce_c6_to_directed_triangles(g, seed=seed, iterations=iterations)
        if isinstance(res, EarlyFound):
            rec.update(early_found=True, witness=list(res.witness.vertices), arcs=None, triangles=None)
            return rec
        pruned, _ = prune_high_degree(g)
        dg, colors, early = res.graph, [int(c) for c in res.colors], False
    tris = directed_triangles(dg)
    c6 = well_colored_c6(pruned, colors)
    rec.update(
        early_found=early,
        colors=colors,
        arcs=[list(a) for a in dg.arcs()],
        triangles=len(tris),
        well_colored_c6=len(c6),
        equivalent=bool(tris) == bool(c6),
    )
    return rec


def cmd_oracle(cfg: ExperimentConfig, trial: int) -> dict:
    g, seed = cfg.graph_for(trial)
    rec = _base(cfg, g, seed, trial)
    rec["girth"] = _girth_str(brute_girth(g))
    if cfg.pattern:
        rec["pattern"] = cfg.pattern
        rec["count"] = len(enumerate_subgraph(g, _pattern(cfg)))
    if cfg.k is not None:
        rec["k"] = cfg.k
        rec["c2k_count"] = len(enumerate_cycles(g, 2 * cfg.k))
    return rec


COMMANDS: dict[str, Callable[[ExperimentConfig, int], dict]] = {
    "girth-approx": cmd_girth_approx,
    "list": cmd_list,
    "detect-clique": cmd_detect_clique,
    "detect-congest": cmd_detect_congest,
    "girth-congest": cmd_girth_congest,
    "reduce": cmd_reduce,
    "oracle": cmd_oracle,
}


# ---------------------------------------------------------------- output


def summarize(records: list[dict]) -> dict:
    out: dict = {"trials": len(records)}
    if records and "found" in records[0]:
        found = sum(bool(r["found"]) for r in records)
        out["found"] = found
        out["rate"] = found / len(records)
        out["all_validated"] = all(r["validated"] for r in records)
    if records and "consistent" in records[0]:
        out["all_consistent"] = all(r["consistent"] for r in records)
    if records and "match" in records[0]:
        out["all_match"] = all(r["match"] for r in records)
    return out


def _cell(v) -> str:
    if isinstance(v, list):
        return " ".join(str(x) if not isinstance(x, list) else "-".join(map(str, x)) for x in v)
    if v is None:
        return ""
    return str(v)


def render(records: list[dict], cfg: ExperimentConfig) -> str:
    if cfg.fmt == "csv":
        cols: list[str] = []
        for r in records:
            cols.extend(c for c in r if c not in cols)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in records:
            w.writerow([_cell(r.get(c)) for c in cols])
        return buf.getvalue()
    report = {
        "command": cfg.command,
        "seed": cfg.seed,
        "records": records,
        "summary": summarize(records),
    }
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="congestlab", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    src = ap.add_mutually_exclusive_group()
    src.add_argument("--graph", help="edge-list file ('n m' header, one 'u v' per line)")
    src.add_argument("--gen", help="generator spec, e.g. er:n=64,p=0.2")
    ap.add_argument("--k", type=int, help="cycle half-length (2k-cycles)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int, default=1, help="macro-trials; trial i uses seed + i")
    ap.add_argument("--mode", choices=[m.value for m in SampleMode], default="god")
    ap.add_argument("--detector", choices=["light", "heavy", "both"], default="both")
    ap.add_argument("--pattern", help="K3, C6, P4, or an edge spec like 0-1,1-2,2-0")
    ap.add_argument("--colors", help="reduce: explicit colors, comma separated")
    ap.add_argument("--iterations", type=int, help="reduce: heavy 6-cycle iterations")
    ap.add_argument("--out", help="write output here instead of stdout")
    ap.add_argument("--format", dest="fmt", choices=["json", "csv"], default="json")
    ap.add_argument("--workers", type=int, default=1, help="threads for trial fan-out")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = ExperimentConfig(
        command=args.command,
        graph=args.graph,
        gen=args.gen,
        seed=args.seed,
        trials=args.trials,
        k=args.k,
        mode=args.mode,
        detector=args.detector,
        pattern=args.pattern,
        out=args.out,
        fmt=args.fmt,
        workers=max(1, args.workers),
        extra={"colors": args.colors, "iterations": args.iterations},
    )
    fn = COMMANDS[cfg.command]
    try:
        if cfg.trials < 1:
            raise ConfigError("--trials must be >= 1")
        if cfg.workers > 1:
            with ThreadPoolExecutor(cfg.workers) as pool:
                records = list(pool.map(lambda t: fn(cfg, t), range(cfg.trials)))
        else:
            records = [fn(cfg, t) for t in range(cfg.trials)]
    except (ConfigError, GraphFormatError, SimulationBudgetExceeded, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantFault as exc:
        print(f"invariant fault: {exc}", file=sys.stderr)
        return EXIT_FAULT
    text = render(records, cfg)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
