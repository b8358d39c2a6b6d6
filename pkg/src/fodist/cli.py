"""Command-line entry point.

Every command prints (or writes to ``--out``) a JSON document embedding the
resolved configuration and the library version.  Settings come from flags,
then ``--config FILE`` (``key = value`` lines, ``#`` comments), then defaults.

Exit codes: 0 success, 2 validation error, 3 budget exceeded, 4 solver failure.
Errors are reported as JSON on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .analysis import REGIME_MIN_N, regime_report, select_mu, statistic_k, tune_statistic
from .errors import BudgetExceededError, FodistError, SolverError, ValidationError
from .families import build_chain
from .games import fo_k_equivalent, min_distinguishing_variables
from .graph import Graph, derive_seed, sample_uniform
from .logic import parse
from .sim import (
    StatisticSentence,
    distinguishing_probability,
    find_witness,
    monte_carlo,
    verify_witness,
)
from .sim.counters import DEFAULT_BUDGET, scan_cost

DEFAULTS = {
    "seed": 0,
    "workers": 1,
    "samples": 500,
    "chain_limit": 7,
    "budget": DEFAULT_BUDGET,
    "kmax": 5,
    "tune_kinds": "X",
    "tune_kmax": 5,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _fail("usage", message, 2)


def _fail(kind: str, message: str, code: int, **extra):
    print(json.dumps({"error": kind, "message": message, **extra}, sort_keys=True), file=sys.stderr)
    sys.exit(code)


def read_config(path: str) -> dict:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _positive(name, value, allow_zero=False):
    if value is None:
        return
    if value < 0 or (value == 0 and not allow_zero):
        raise ValidationError(f"{name} must be {'nonnegative' if allow_zero else 'positive'}, got {value}")


def _graph_spec(text: str) -> Graph:
    """k5 complete, c5 cycle, p5 path, e5 edgeless, or g6:<graph6>."""
    text = text.strip()
    if text.startswith("g6:"):
        return Graph.from_graph6(text[3:])
    makers = {"k": Graph.complete, "c": Graph.cycle, "p": Graph.path, "e": Graph.empty}
    if text[:1].lower() in makers and text[1:].isdigit():
        return makers[text[0].lower()](int(text[1:]))
    raise ValidationError(f"cannot read graph {text!r}; use k5, c5, p5, e5 or g6:<code>")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fodist", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", help="key = value settings file")
        sp.add_argument("--out", help="output path (stdout if omitted)")
        sp.add_argument("--seed", type=int, help="master seed (default 0)")
        sp.add_argument("--workers", type=int, help="parallel sample workers")
        sp.add_argument("--budget", type=float, help="scan cost budget")

    sp = sub.add_parser("thresholds", help="solve thresholds and pick regimes")
    common(sp)
    sp.add_argument("--n", type=int)
    sp.add_argument("--chain-limit", type=int)

    sp = sub.add_parser("family", help="export the family chain on k vertices")
    common(sp)
    sp.add_argument("--k", type=int)

    sp = sub.add_parser("simulate", help="Monte Carlo experiments")
    common(sp)
    sp.add_argument("experiment", choices=["x-count", "distinguish"])
    sp.add_argument("--n", type=int)
    sp.add_argument("--samples", type=int)
    sp.add_argument("--kind", choices=["X", "Y", "Z"])
    sp.add_argument("--k", type=int)
    sp.add_argument("--mu", type=int)
    sp.add_argument("--formula", help="sentence text for the distinguish experiment")
    sp.add_argument("--tune-kinds", help="statistics allowed when tuning, e.g. X or XYZ")
    sp.add_argument("--tune-kmax", type=int)

    sp = sub.add_parser("witness", help="part-2 witness search on a seeded pair")
    common(sp)
    sp.add_argument("--n", type=int)
    sp.add_argument("--k", type=int)
    sp.add_argument("--mode", choices=["X", "Y"])

    sp = sub.add_parser("games", help="FO^k equivalence of a graph pair")
    common(sp)
    sp.add_argument("--pair", help="two graphs, e.g. k3,k4 or c5,g6:D?{")
    sp.add_argument("--kmax", type=int)
    return p


def resolve(args: argparse.Namespace, parser: argparse.ArgumentParser) -> dict:
    """Merge flags over the config file over defaults, converting config strings."""
    sub = parser._subparsers._group_actions[0].choices[args.command]
    types = {a.dest: a.type for a in sub._actions if a.dest != "help"}
    cfg = read_config(args.config) if getattr(args, "config", None) else {}
    unknown = set(cfg) - set(types)
    if unknown:
        raise ValidationError(f"unknown config keys: {', '.join(sorted(unknown))}")
    out = {}
    for dest, typ in types.items():
        if dest in ("config", "out"):
            continue
        value = getattr(args, dest, None)
        if value is None and dest in cfg:
            try:
                value = typ(cfg[dest]) if typ else cfg[dest]
            except ValueError as exc:
                raise ValidationError(f"config {dest}: {exc}") from None
        if value is None:
            value = DEFAULTS.get(dest)
        out[dest] = value
    out["command"] = args.command
    for name in ("n", "k", "samples", "workers", "kmax", "chain_limit", "tune_kmax"):
        _positive(name, out.get(name), allow_zero=(name == "samples"))
    _positive("mu", out.get("mu"), allow_zero=True)
    return out


def _emit(doc: dict, out: str | None, suffix: str = ".json"):
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out:
        path = Path(out)
        if path.suffix == "":
            path = path.with_suffix(suffix)
        path.write_text(text)
    else:
        sys.stdout.write(text)


def _envelope(cfg: dict, result) -> dict:
    return {"command": cfg["command"], "version": __version__, "config": cfg, "result": result}


def _require(cfg, key):
    if cfg.get(key) is None:
        raise ValidationError(f"--{key.replace('_', '-')} is required")
    return cfg[key]


def cmd_thresholds(cfg: dict, out):
    n = _require(cfg, "n")
    if n < REGIME_MIN_N:
        raise ValidationError(f"thresholds need n >= {REGIME_MIN_N}, got {n}")
    rep = regime_report(n, chain_limit=cfg["chain_limit"])
    _emit(_envelope(cfg, rep.to_dict()), out)


def cmd_family(cfg: dict, out):
    chain = build_chain(_require(cfg, "k"))
    _emit(_envelope(cfg, chain.to_dict()), out)


def _statistic_setup(cfg: dict, n: int, default_kind: str = "X"):
    """(kind, chain, mu) from explicit flags, else k from the kind's threshold and mu nearest ln 2."""
    kind = cfg.get("kind") or default_kind
    k = cfg.get("k")
    if k is None:
        if n < REGIME_MIN_N:
            raise ValidationError(f"give --k when n < {REGIME_MIN_N}")
        k = statistic_k(n, kind)
    chain = build_chain(k)
    mu = cfg.get("mu")
    if mu is None:
        mu, _ = select_mu(n, k, chain, kind)
    return kind, chain, mu


def _write_record(rec, cfg: dict, out):
    doc = _envelope(cfg, rec.to_dict())
    if out:
        base = Path(out)
        base = base.with_suffix("") if base.suffix else base
        base.with_suffix(".summary.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        base.with_suffix(".jsonl").write_text(rec.samples_jsonl())
        base.with_suffix(".csv").write_text(rec.summary_csv())
    else:
        _emit(doc, None)


def cmd_simulate(cfg: dict, out):
    n = _require(cfg, "n")
    samples = cfg["samples"]
    if cfg["experiment"] == "x-count":
        kind, chain, mu = _statistic_setup(cfg, n)
        rec = monte_carlo(n, kind, chain, mu, samples, cfg["seed"], cfg["workers"], cfg["budget"])
        _write_record(rec, cfg, out)
        return
    if cfg.get("formula"):
        sentence, budget = parse(cfg["formula"]), None
    else:
        if cfg.get("kind") and cfg.get("k"):
            kind, chain, mu = _statistic_setup(cfg, n)
        else:
            kinds = tuple(cfg["tune_kinds"].upper())
            tuned = tune_statistic(
                n, kinds=kinds, ks=range(2, cfg["tune_kmax"] + 1),
                feasible=lambda kind, k: 2 * samples * scan_cost(n, k, kind) <= cfg["budget"],
            )
            kind, chain, mu = tuned.kind, build_chain(tuned.k), tuned.mu
        sentence, budget = StatisticSentence(kind, chain, mu), cfg["budget"]
    rec = distinguishing_probability(n, sentence, samples, cfg["seed"], cfg["workers"], budget)
    _write_record(rec, cfg, out)


def cmd_witness(cfg: dict, out):
    n = _require(cfg, "n")
    k, mode = cfg.get("k"), cfg.get("mode")
    if k is None or mode is None:
        if n < REGIME_MIN_N:
            raise ValidationError(f"give --k and --mode when n < {REGIME_MIN_N}")
        rep = regime_report(n)
        k = k or rep.k_part2
        mode = mode or rep.regime_part2
    seed = cfg["seed"]
    g1 = sample_uniform(n, derive_seed(seed, 0))
    g2 = sample_uniform(n, derive_seed(seed, 1))
    outcome = find_witness(g1, g2, k, mode, cfg["budget"])
    result = outcome.to_dict()
    check = verify_witness(outcome, g1, g2)
    result["verification"] = None if check is None else {"winner": check[0], "loser": check[1]}
    _emit(_envelope(cfg, result), out)


def cmd_games(cfg: dict, out):
    pair = _require(cfg, "pair").split(",")
    if len(pair) != 2:
        raise ValidationError("--pair takes exactly two graphs")
    g1, g2 = (_graph_spec(s) for s in pair)
    kmax = cfg["kmax"]
    table = {}
    for k in range(1, kmax + 1):
        table[str(k)] = fo_k_equivalent(g1, g2, k)
    result = {
        "graphs": [g1.to_graph6(), g2.to_graph6()],
        "equivalent": table,
        "min_distinguishing_variables": min_distinguishing_variables(g1, g2, kmax),
    }
    _emit(_envelope(cfg, result), out)


COMMANDS = {
    "thresholds": cmd_thresholds,
    "family": cmd_family,
    "simulate": cmd_simulate,
    "witness": cmd_witness,
    "games": cmd_games,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args, parser)
        COMMANDS[args.command](cfg, getattr(args, "out", None))
    except ValidationError as exc:
        _fail(type(exc).__name__, str(exc), 2)
    except BudgetExceededError as exc:
        _fail("BudgetExceededError", str(exc), 3, cost=exc.cost, budget=exc.budget)
    except SolverError as exc:
        _fail("SolverError", str(exc), 4, diagnostics=exc.diagnostics)
    except FodistError as exc:
        _fail(type(exc).__name__, str(exc), 2)
    except OSError as exc:
        _fail("OSError", str(exc), 2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
