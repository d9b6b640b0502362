"""Command-line interface.

    wdist field-info  --p 3 --n 3
    wdist rank-dist   --p 3 --n 3 --k 1
    wdist expsum-dist --p 3 --n 3 --k 1 [--sweep gamma-delta|full]
    wdist weights     --p 3 --n 5 --k 1 --method closed
    wdist verify      --p 3 --n 3 --k 1 [--tier quick|standard|extended]

Every flag can also come from an environment variable WDIST_<FLAG>
(e.g. WDIST_P=5, WDIST_NO_CACHE=1); flags on the command line win.

Exit codes: 0 success, 1 a check failed, 2 usage or invalid parameters,
3 a budget (tier, memory, table size) was exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import __version__, formulas
from .cache import ResultCache, default_cache_dir
from .errors import BudgetExceeded, ParameterError, WdistError
from .expsums import (
    DEFAULT_MEMORY_CAP,
    classify_histogram,
    moments_from_histogram,
    triple_histogram,
)
from .field import FieldCtx, format_modulus, make_field, validate_params
from .forms import pair_sweep, rank_table_from_joint, sign_class_distribution
from .weights import minimum_weight, weight_table_invariants, weights_from_histogram

log = logging.getLogger("wdist")

TIER_MAX_PAIRS = {"quick": 3**6, "standard": 3**10, "extended": 3**12}
METHODS = ("enumerate", "transform", "closed")
FORMATS = ("table", "json", "csv")


@dataclass
class RunConfig:
    command: str
    p: int | None
    n: int | None
    k: int | None
    modulus: str | None
    method: str
    fmt: str
    threads: int
    max_table_bytes: int
    tier: str
    use_cache: bool
    cache_dir: Path
    plot_dir: Path | None
    sweep: str = "gamma-delta"
    unmerged: bool = False


def _env(name: str, default=None):
    return os.environ.get(f"WDIST_{name}", default)


def _env_flag(name: str) -> bool:
    return str(_env(name, "")).lower() in ("1", "true", "yes", "on")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=_env("P"))
    common.add_argument("--n", type=int, default=_env("N"))
    common.add_argument("--k", type=int, default=_env("K"))
    common.add_argument("--modulus", default=_env("MODULUS"),
                        help="ascending coefficients, e.g. 1,2,0,1 for 1 + 2x + x^3")
    common.add_argument("--method", choices=METHODS, default=_env("METHOD"))
    common.add_argument("--format", dest="fmt", choices=FORMATS, default=_env("FORMAT", "table"))
    common.add_argument("--threads", type=int, default=int(_env("THREADS", os.cpu_count() or 1)))
    common.add_argument("--max-table-bytes", type=int, default=int(_env("MAX_TABLE_BYTES", DEFAULT_MEMORY_CAP)))
    common.add_argument("--tier", choices=tuple(TIER_MAX_PAIRS), default=_env("TIER", "standard"))
    common.add_argument("--no-cache", action="store_true", default=_env_flag("NO_CACHE"))
    common.add_argument("--cache-dir", type=Path, default=_env("CACHE_DIR"))
    common.add_argument("--plot-dir", type=Path, default=_env("PLOT_DIR"),
                        help="also render figures into this directory")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="wdist", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"wdist {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("field-info", parents=[common], help="modulus, primitive element and tables of GF(p^n)")
    sub.add_parser("rank-dist", parents=[common], help="rank and sign classes of the quadratic forms")
    es = sub.add_parser("expsum-dist", parents=[common], help="distribution of the exponential sums")
    es.add_argument("--sweep", choices=("gamma-delta", "full"), default=_env("SWEEP", "gamma-delta"))
    w = sub.add_parser("weights", parents=[common], help="weight distribution of the code")
    w.add_argument("--unmerged", action="store_true", help="closed form: list rows before merging equal weights")
    sub.add_parser("verify", parents=[common], help="run every check against the closed forms")
    return parser


def config_from_args(args) -> RunConfig:
    return RunConfig(
        command=args.command,
        p=args.p,
        n=args.n,
        k=args.k,
        modulus=args.modulus,
        method=args.method or ("closed" if args.command == "weights" else "transform"),
        fmt=args.fmt,
        threads=max(1, args.threads),
        max_table_bytes=args.max_table_bytes,
        tier=args.tier,
        use_cache=not args.no_cache,
        cache_dir=args.cache_dir or default_cache_dir(),
        plot_dir=args.plot_dir,
        sweep=getattr(args, "sweep", "gamma-delta"),
        unmerged=getattr(args, "unmerged", False),
    )


# --- shared helpers ---------------------------------------------------------

def _require(cfg: RunConfig, *names: str) -> None:
    missing = [f"--{x}" for x in names if getattr(cfg, x) is None]
    if missing:
        raise ParameterError(f"missing {', '.join(missing)}")


def _field(cfg: RunConfig) -> FieldCtx:
    return make_field(cfg.p, cfg.n, cfg.modulus, cache_dir=cfg.cache_dir if cfg.use_cache else None)


def _setup(cfg: RunConfig):
    _require(cfg, "p", "n", "k")
    params = validate_params(cfg.p, cfg.n, cfg.k)
    ctx = _field(cfg)
    return params, ctx


def _check_tier(cfg: RunConfig, params) -> None:
    pairs = params.q**2
    if pairs > TIER_MAX_PAIRS[cfg.tier]:
        raise BudgetExceeded(
            f"{params} sweeps {pairs} pairs, over the {cfg.tier} tier limit of {TIER_MAX_PAIRS[cfg.tier]}"
        )


def _head(params, ctx) -> dict:
    return {"p": params.p, "n": params.n, "k": params.k, "modulus": format_modulus(ctx.modulus)}


def _cached(cfg: RunConfig, params, ctx, compute, **extra) -> dict:
    cache = ResultCache(cfg.cache_dir, enabled=cfg.use_cache)
    key = cache.key(command=cfg.command, version=__version__, modulus=format_modulus(ctx.modulus),
                    p=params.p, n=params.n, k=params.k, **extra)
    payload = cache.load(key)
    if payload is not None:
        log.info("replaying cached result %s", key)
        return payload
    start = time.perf_counter()
    payload = compute()
    log.info("computed in %.2fs", time.perf_counter() - start)
    cache.store(key, payload)
    return payload


def _status(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def _format_table(header: list[str], rows: list[list]) -> str:
    cells = [header] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.rjust(w) if i else c.ljust(w) for i, (c, w) in enumerate(zip(r, widths))).rstrip()
             for r in cells]
    return "\n".join(lines) + "\n"


def _format_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _poly_text(modulus) -> str:
    terms = []
    for i, c in enumerate(modulus):
        if not c:
            continue
        mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
        coef = str(c) if (c != 1 or i == 0) else ""
        terms.append(coef + mono)
    return " + ".join(terms)


def _plot_path(cfg: RunConfig, stem: str, params) -> Path:
    return cfg.plot_dir / f"{stem}_p{params.p}_n{params.n}_k{params.k}.png"


# --- field-info ---------------------------------------------------------------

def cmd_field_info(cfg: RunConfig, out) -> int:
    _require(cfg, "p", "n")
    params = validate_params(cfg.p, cfg.n, cfg.k) if cfg.k is not None else None
    ctx = _field(cfg)
    order_ok = len(set(ctx.exp_table.tolist())) == ctx.order and int(ctx.pow(ctx.alpha, ctx.order)) == 1
    info = {
        "p": ctx.p,
        "n": ctx.n,
        "modulus": format_modulus(ctx.modulus),
        "polynomial": _poly_text(ctx.modulus),
        "alpha": ctx.alpha,
        "order": ctx.order,
        "order_confirmed": order_ok,
        "exp_table_entries": int(ctx.exp_table.size),
        "log_table_entries": int(ctx.log_table.size),
    }
    if params is not None:
        info.update(k=params.k, d=params.d, s=params.s)
    if cfg.fmt == "json":
        out.write(json.dumps(info, indent=2) + "\n")
    elif cfg.fmt == "csv":
        out.write(_format_csv(["field", "value"], [[k, v] for k, v in info.items()]))
    else:
        out.write(f"field GF({ctx.p}^{ctx.n})\n")
        out.write(f"modulus {info['modulus']}  ({info['polynomial']})\n")
        out.write(f"alpha encoded as {ctx.alpha}\n")
        out.write(f"order {ctx.order} {'confirmed' if order_ok else 'NOT confirmed'}\n")
        out.write(f"tables exp={info['exp_table_entries']} log={info['log_table_entries']}\n")
        if params is not None:
            out.write(f"d={params.d} s={params.s}\n")
    return 0 if order_ok else 1


# --- rank-dist ------------------------------------------------------------------

def _rank_section(params, joint) -> dict:
    observed = rank_table_from_joint(joint)
    expected = formulas.rank_counts(params)
    rows = [{"m": m, "rank": params.s - m, "rank_over_prime": params.n - params.d * m,
             "freq": str(observed[m]), "expected": str(expected[m])} for m in (0, 1, 2)]
    signs_obs = sign_class_distribution(params, None, joint=joint)
    signs_exp = formulas.sign_class_counts(params)
    srows = [{"i": i, "j": j, "freq": str(signs_obs[(i, j)]), "expected": str(signs_exp[(i, j)])}
             for i in (0, 1, 2) for j in (1, -1)]
    return {
        "ranks": rows,
        "sign_classes": srows,
        "status": _status(observed == expected and signs_obs == signs_exp),
    }


def cmd_rank_dist(cfg: RunConfig, out) -> int:
    params, ctx = _setup(cfg)
    _check_tier(cfg, params)

    def compute():
        joint = pair_sweep(params, ctx, workers=cfg.threads)
        return {**_head(params, ctx), "d": params.d, "s": params.s, **_rank_section(params, joint)}

    payload = _cached(cfg, params, ctx, compute)
    _render_rank(cfg, payload, out)
    if cfg.plot_dir:
        from .plotting import plot_class_distribution

        rows = payload["ranks"] + payload["sign_classes"]
        labels = [f"rank s-{r['m']}" if "m" in r else f"R({r['i']},{r['j']:+d})" for r in rows]
        path = plot_class_distribution(labels, [int(r["expected"]) for r in rows], [int(r["freq"]) for r in rows],
                                       _plot_path(cfg, "rank_dist", params), f"rank classes, {params}")
        print(f"figure {path}", file=sys.stderr)
    return 0 if payload["status"] == "PASS" else 1


def _render_rank(cfg, payload, out):
    header = ["m", "rank", "rank_over_prime", "freq", "expected"]
    rows = [[r[h] for h in header] for r in payload["ranks"]]
    sheader = ["i", "j", "freq", "expected"]
    srows = [[r[h] for h in sheader] for r in payload["sign_classes"]]
    if cfg.fmt == "json":
        out.write(json.dumps(payload, indent=2) + "\n")
    elif cfg.fmt == "csv":
        out.write(_format_csv(header, rows))
        out.write(_format_csv(sheader, srows))
    else:
        out.write(_format_table(header, rows))
        out.write("\n" + _format_table(sheader, srows))
        out.write(f"{payload['status']} rank distribution\n")


# --- expsum-dist ----------------------------------------------------------------

def _class_rows(observed, expected) -> list[dict]:
    keys = sorted(set(observed.keys()) | set(expected.keys()), key=lambda c: c.sort_key)
    return [{"class": c.label, **c.as_dict(), "freq": str(observed[c]), "expected": str(expected[c])} for c in keys]


def cmd_expsum_dist(cfg: RunConfig, out) -> int:
    params, ctx = _setup(cfg)
    _check_tier(cfg, params)
    if cfg.sweep == "full" and cfg.method == "closed":
        raise ParameterError("the full sweep needs --method enumerate or transform")

    def compute():
        if cfg.sweep == "full":
            hist = triple_histogram(params, ctx, method=cfg.method, workers=cfg.threads,
                                    mem_cap=cfg.max_table_bytes)
            observed = classify_histogram(params, hist)
            expected = formulas.triple_sum_distribution(params)
        else:
            joint = pair_sweep(params, ctx, workers=cfg.threads)
            observed = classify_histogram(params, _s0_from_joint(joint))
            expected = formulas.pair_sum_distribution(params)
        return {**_head(params, ctx), "sweep": cfg.sweep, "rows": _class_rows(observed, expected),
                "status": _status(observed == expected)}

    payload = _cached(cfg, params, ctx, compute, sweep=cfg.sweep,
                      method=cfg.method if cfg.sweep == "full" else None)
    header = ["class", "freq", "expected"]
    rows = [[r[h] for h in header] for r in payload["rows"]]
    if cfg.fmt == "json":
        out.write(json.dumps(payload, indent=2) + "\n")
    elif cfg.fmt == "csv":
        out.write(_format_csv(header, rows))
    else:
        out.write(_format_table(header, rows))
        out.write(f"{payload['status']} exponential sum distribution ({cfg.sweep})\n")
    if cfg.plot_dir:
        from .plotting import plot_class_distribution

        r = payload["rows"]
        path = plot_class_distribution([x["class"] for x in r], [int(x["expected"]) for x in r],
                                       [int(x["freq"]) for x in r],
                                       _plot_path(cfg, f"expsum_{cfg.sweep}", params),
                                       f"exponential sums ({cfg.sweep}), {params}")
        print(f"figure {path}", file=sys.stderr)
    return 0 if payload["status"] == "PASS" else 1


def _s0_from_joint(joint):
    from collections import Counter

    hist = Counter()
    for (_, counts), freq in joint.items():
        hist[counts] += freq
    return hist


# --- weights --------------------------------------------------------------------

def cmd_weights(cfg: RunConfig, out) -> int:
    params, ctx = _setup(cfg)
    closed = formulas.weight_distribution(params)
    if cfg.method == "closed":
        if cfg.unmerged:
            rows = [{"weight": w, "freq": str(f)} for w, f in formulas.weight_rows(params)]
        else:
            rows = [{"weight": w, "freq": str(f)} for w, f in closed.items()]
        payload = {**_head(params, ctx), "rows": rows}
    else:
        _check_tier(cfg, params)

        def compute():
            hist = triple_histogram(params, ctx, method=cfg.method, workers=cfg.threads,
                                    mem_cap=cfg.max_table_bytes)
            table = weights_from_histogram(params, hist)
            return {**_head(params, ctx), "rows": [{"weight": w, "freq": str(f)} for w, f in table.items()]}

        payload = _cached(cfg, params, ctx, compute, method=cfg.method)

    if cfg.fmt == "json":
        out.write(json.dumps(payload, indent=2) + "\n")
    elif cfg.fmt == "csv":
        out.write(_format_csv(["weight", "frequency"], [[r["weight"], r["freq"]] for r in payload["rows"]]))
    else:
        out.write(_format_table(["weight", "frequency"], [[r["weight"], r["freq"]] for r in payload["rows"]]))
        from .tables import DistributionTable

        table = DistributionTable({r["weight"]: int(r["freq"]) for r in payload["rows"]})
        out.write(f"smallest nonzero weight {minimum_weight(table)}\n")
    if cfg.plot_dir:
        from .plotting import plot_weight_distribution

        obs = {r["weight"]: r["freq"] for r in payload["rows"]}
        rows = [{"weight": w, "freq": f, **({"observed": obs.get(w, 0)} if cfg.method != "closed" else {})}
                for w, f in closed.items()]
        path = plot_weight_distribution(rows, _plot_path(cfg, f"weights_{cfg.method}", params),
                                        f"weight distribution, {params}")
        print(f"figure {path}", file=sys.stderr)
    return 0


# --- verify ---------------------------------------------------------------------

def _verify_payload(cfg: RunConfig, params, ctx) -> dict:
    checks = []
    joint = pair_sweep(params, ctx, workers=cfg.threads)
    s0 = _s0_from_joint(joint)
    s0[(ctx.q,) + (0,) * (ctx.p - 1)] += 1  # the pair (0, 0)

    first, second = moments_from_histogram(params.p, s0)
    exp_first, exp_second = formulas.expected_moments(params)
    checks.append({
        "name": "moments",
        "status": _status(first == exp_first and second == exp_second),
        "detail": {"first": str(first), "expected_first": str(exp_first),
                   "second": str(second), "expected_second": str(exp_second)},
    })

    rank = _rank_section(params, joint)
    checks.append({"name": "rank-dist", "status": rank["status"],
                   "detail": {"ranks": rank["ranks"], "sign_classes": rank["sign_classes"]}})

    pair_obs = classify_histogram(params, _s0_from_joint(joint))
    pair_exp = formulas.pair_sum_distribution(params)
    hist = triple_histogram(params, ctx, method=cfg.method, workers=cfg.threads, mem_cap=cfg.max_table_bytes)
    triple_obs = classify_histogram(params, hist)
    triple_exp = formulas.triple_sum_distribution(params)
    checks.append({
        "name": "expsum-dist",
        "status": _status(pair_obs == pair_exp and triple_obs == triple_exp),
        "detail": {"gamma_delta": _class_rows(pair_obs, pair_exp), "full": _class_rows(triple_obs, triple_exp)},
    })

    empirical = weights_from_histogram(params, hist)
    closed = formulas.weight_distribution(params)
    inv = {f"closed.{k}": v for k, v in weight_table_invariants(params, closed).items()}
    inv.update({f"empirical.{k}": v for k, v in weight_table_invariants(params, empirical).items()})
    checks.append({
        "name": "weights",
        "status": _status(closed == empirical and all(inv.values())),
        "detail": {
            "rows": [{"weight": w, "freq": str(closed[w]), "observed": str(empirical[w])}
                     for w in sorted(set(closed.keys()) | set(empirical.keys()))],
            "invariants": inv,
        },
    })
    return {**_head(params, ctx), "method": cfg.method, "checks": checks,
            "status": _status(all(c["status"] == "PASS" for c in checks))}


def _summary(check: dict) -> str:
    d = check["detail"]
    if check["name"] == "moments":
        return f"first={d['first']} second={d['second']}"
    if check["name"] == "rank-dist":
        return " ".join(f"m={r['m']}:{r['freq']}" for r in d["ranks"])
    if check["name"] == "expsum-dist":
        return f"{len(d['gamma_delta'])} classes over pairs, {len(d['full'])} over triples"
    return f"{len(d['rows'])} distinct weights"


def _divergent(check: dict) -> list:
    d = check["detail"]
    if check["name"] == "moments":
        return [d]
    if check["name"] == "rank-dist":
        return [r for r in d["ranks"] + d["sign_classes"] if r["freq"] != r["expected"]]
    if check["name"] == "expsum-dist":
        return [r for r in d["gamma_delta"] + d["full"] if r["freq"] != r["expected"]]
    bad = [r for r in d["rows"] if r["freq"] != r["observed"]]
    return bad + [{"invariant": k} for k, v in d["invariants"].items() if not v]


def cmd_verify(cfg: RunConfig, out) -> int:
    params, ctx = _setup(cfg)
    if cfg.method == "closed":
        raise ParameterError("verify compares the closed form against --method enumerate or transform")
    _check_tier(cfg, params)
    payload = _cached(cfg, params, ctx, lambda: _verify_payload(cfg, params, ctx), method=cfg.method)
    failures = [{"check": c["name"], "divergent": _divergent(c)} for c in payload["checks"] if c["status"] != "PASS"]
    if cfg.fmt == "json":
        out.write(json.dumps(payload, indent=2) + "\n")
    elif cfg.fmt == "csv":
        out.write(_format_csv(["check", "status", "summary"],
                              [[c["name"], c["status"], _summary(c)] for c in payload["checks"]]))
    else:
        for c in payload["checks"]:
            out.write(f"{c['status']} {c['name']:<12} {_summary(c)}\n")
        if failures:
            out.write("FAILURES " + json.dumps(failures, separators=(",", ":")) + "\n")
    if cfg.plot_dir:
        from .plotting import plot_class_distribution, plot_weight_distribution

        checks = {c["name"]: c for c in payload["checks"]}
        w = checks["weights"]["detail"]["rows"]
        paths = [plot_weight_distribution(w, _plot_path(cfg, "verify_weights", params),
                                          f"weight distribution, {params}")]
        r = checks["expsum-dist"]["detail"]["gamma_delta"]
        paths.append(plot_class_distribution([x["class"] for x in r], [int(x["expected"]) for x in r],
                                             [int(x["freq"]) for x in r],
                                             _plot_path(cfg, "verify_expsum", params),
                                             f"S(0, gamma, delta), {params}"))
        for path in paths:
            print(f"figure {path}", file=sys.stderr)
    return 0 if payload["status"] == "PASS" else 1


COMMANDS = {
    "field-info": cmd_field_info,
    "rank-dist": cmd_rank_dist,
    "expsum-dist": cmd_expsum_dist,
    "weights": cmd_weights,
    "verify": cmd_verify,
}


def main(argv=None, out=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    cfg = config_from_args(args)
    out = out or sys.stdout
    try:
        return COMMANDS[cfg.command](cfg, out)
    except WdistError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
