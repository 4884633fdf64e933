"""Command-line front end.

Subcommands: ``weights``, ``simulate``, ``construct linear``,
``construct sublinear``, ``cylsum``, ``verify``.  All randomized outputs
carry the seed in a header comment (CSV) or field (JSON) and are
byte-identical across reruns with the same arguments; the thread count
only affects wall time, never output bytes.

Exit codes: 0 success, 2 usage (argparse), 3 invalid values, 4 a
verification suite reported failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import codec, linear, occupancy, sublinear, tilt, verify, weights
from .errors import IfsDigitsError
from .rng import DEFAULT_SEED, substream

__all__ = ["main", "build_parser"]


def _parse_seed(text: str) -> int:
    return int(text, 0)


def _parse_int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ifsdigits",
        description="Distinct-digit statistics of affine digit expansions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, model: bool = True) -> None:
        if model:
            p.add_argument("--model", help="model kind: luroth, power, power-log, explicit-prefix")
            p.add_argument("--rho", type=float, help="tail index for power kinds")
            p.add_argument("--gamma", type=float, help="log exponent for power-log")
            p.add_argument("--prefix", help="comma-separated explicit prefix probabilities")
            p.add_argument("--config", help="JSON config file; flags override its values")
        p.add_argument("--seed", type=_parse_seed, default=None, help="RNG seed (default 0xD1617)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--threads", type=int, default=1)

    w = sub.add_parser("weights", help="weight tables and derived scalars")
    add_common(w)
    w.add_argument("--k-max", type=int, default=10, help="print p_k for k up to this")
    w.add_argument("--solve-s", type=int, action="append", default=[],
                   help="solve the truncated-sum exponent at this K (repeatable)")
    w.add_argument("--tail", type=int, action="append", default=[],
                   help="tail sum from this start index (repeatable)")
    w.add_argument("--tilted-tail", nargs=2, action="append", default=[],
                   metavar=("M", "S"), help="tilted tail sum from M at exponent S")
    w.add_argument("--potter", type=float, help="run the dyadic ratio scan at this epsilon")
    w.add_argument("--scan-limit", type=int, default=10_000)
    w.set_defaults(func=cmd_weights)

    s = sub.add_parser("simulate", help="Monte Carlo occupancy law")
    add_common(s)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--trials", type=int, required=True)
    s.add_argument("--checkpoints", type=_parse_int_list, default=None)
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("construct", help="sample points from the constructions")
    csub = c.add_subparsers(dest="construction", required=True)

    cl = csub.add_parser("linear", help="block concatenation at a linear rate")
    add_common(cl)
    cl.add_argument("--theta", type=float, required=True)
    cl.add_argument("--depth", type=int, required=True, help="number of blocks")
    cl.add_argument("--k1", type=int, default=None, help="override the scan-derived start index")
    cl.add_argument("--word-out", help="also write the digit word to this path")
    cl.set_defaults(func=cmd_construct_linear)

    cs = csub.add_parser("sublinear", help="forced-digit construction at a sublinear profile")
    add_common(cs)
    cs.add_argument("--profile", default="sqrt", help="sqrt, log, power, or a JSON profile spec")
    cs.add_argument("--beta", type=float, default=None, help="exponent for the power profile")
    cs.add_argument("--c", type=float, default=1.0, help="scale for the power profile")
    cs.add_argument("--t", type=float, required=True, help="dimension target in (0,1)")
    cs.add_argument("--n", type=int, required=True, help="word length (profile horizon)")
    cs.add_argument("--word-out", help="also write the digit word to this path")
    cs.set_defaults(func=cmd_construct_sublinear)

    cy = sub.add_parser("cylsum", help="tilted cylinder sums and the bound chain")
    add_common(cy)
    cy.add_argument("--n", type=_parse_int_list, required=True,
                    help="comma-separated word lengths")
    cy.add_argument("--s", type=float, required=True)
    cy.add_argument("--theta", type=float, required=True)
    cy.add_argument("--mode", choices=("exact", "mc"), default="mc")
    cy.add_argument("--cap", type=int, default=6, help="alphabet cap for exact mode")
    cy.add_argument("--trials", type=int, default=100_000)
    cy.set_defaults(func=cmd_cylsum)

    v = sub.add_parser("verify", help="run the named invariant suites")
    v.add_argument("tier", choices=("quick", "full"))
    v.add_argument("--fail-inject", action="store_true",
                   help="append a check that always fails (harness self-test)")
    add_common(v, model=False)
    v.set_defaults(func=cmd_verify)

    return parser


# -- plumbing -------------------------------------------------------------------


def _load_config(args) -> dict:
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
        if not isinstance(cfg, dict):
            raise IfsDigitsError("config file must hold a JSON object")
        return cfg
    return {}


def _resolve_model(args) -> weights.WeightModel:
    cfg = _load_config(args)
    spec = dict(cfg.get("model", {}))
    if getattr(args, "model", None):
        spec["kind"] = args.model
    if getattr(args, "rho", None) is not None:
        spec["rho"] = args.rho
    if getattr(args, "gamma", None) is not None:
        spec["gamma"] = args.gamma
    if getattr(args, "prefix", None):
        spec["prefix"] = [float(x) for x in args.prefix.split(",") if x]
    if not spec.get("kind"):
        spec["kind"] = "luroth"
    return weights.model_from_spec(spec)


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    cfg = _load_config(args)
    if "seed" in cfg:
        return int(cfg["seed"])
    return DEFAULT_SEED


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit_json(args, obj: dict) -> None:
    _emit(args, json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _word_line(word) -> str:
    return codec.word_to_line(word) + "\n"


# -- subcommands ------------------------------------------------------------------


def cmd_weights(args) -> int:
    model = _resolve_model(args)
    rows = []
    cum = 0.0
    for k in range(1, max(args.k_max, 0) + 1):
        p = weights.weight(model, k)
        cum += p
        rows.append(("p", k, p))
        rows.append(("cum", k, cum))
    for K in args.solve_s:
        rows.append(("s", K, weights.partial_sum_exponent(model, K)))
    for M in args.tail:
        rows.append(("tail", M, weights.tail_sum(model, M)))
    for M, s in args.tilted_tail:
        rows.append((f"tilted_tail(s={float(s)!r})", int(M),
                     weights.tilted_tail_sum(model, int(M), float(s))))
    if args.potter is not None:
        rep = weights.potter_scan(model, args.potter, args.scan_limit)
        rows.append((f"potter_k_eps(eps={args.potter!r})", rep.scan_limit, float(rep.k_eps)))
        rows.append((f"potter_C_eps(eps={args.potter!r})", rep.scan_limit, rep.C_eps))
    if args.format == "json":
        _emit_json(args, {
            "model": model.describe(),
            "rows": [{"quantity": q, "k": k, "value": v} for q, k, v in rows],
        })
    else:
        lines = [f"# model={model.describe()}", "quantity,k,value"]
        lines += [f"{q},{k},{float(v)!r}" for q, k, v in rows]
        _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_simulate(args) -> int:
    model = _resolve_model(args)
    seed = _resolve_seed(args)
    report = occupancy.monte_carlo_law(
        model,
        args.n,
        args.trials,
        seed,
        checkpoints=args.checkpoints,
        threads=max(1, args.threads),
    )
    if args.format == "json":
        _emit(args, occupancy.law_report_to_json(report))
    else:
        _emit(args, occupancy.law_report_to_csv(report))
    return 0


def cmd_construct_linear(args) -> int:
    model = _resolve_model(args)
    seed = _resolve_seed(args)
    sched = linear.build_block_schedule(model, args.theta, args.depth, k1=args.k1)
    word = sched.sample_word(args.depth, substream(seed, 0x11EA, args.depth))
    trace = linear.point_trace(sched, word)
    if args.word_out:
        Path(args.word_out).write_text(_word_line(word), encoding="utf-8")
    header = (
        f"# seed={seed} theta={float(sched.theta)!r} depth={args.depth} "
        f"k1={sched.k1} model={model.describe()}"
    )
    if args.format == "json":
        _emit_json(args, {
            "seed": seed,
            "theta": float(sched.theta),
            "depth": args.depth,
            "k1": sched.k1,
            "word": [int(d) for d in word],
            "trace": {key: [float(v) for v in col] for key, col in trace.items()},
        })
    else:
        lines = [header, "n,distinct,target,upper,log_mass,log_diam,local_dim"]
        for i in range(len(trace["n"])):
            lines.append(
                f"{trace['n'][i]},{trace['distinct'][i]},{float(trace['target'][i])!r},"
                f"{float(trace['upper'][i])!r},{float(trace['log_mass'][i])!r},"
                f"{float(trace['log_diam'][i])!r},{float(trace['local_dim'][i])!r}"
            )
        _emit(args, "\n".join(lines) + "\n")
    return 0


def _profile_from_args(args) -> sublinear.AdmissibleProfile:
    # Validate on a horizon of at least 1024: the decay-clause proxy needs a
    # last decade long enough to be meaningful even for short sample requests.
    horizon = max(args.n, 1024)
    text = args.profile
    if text.strip().startswith("{"):
        spec = json.loads(text)
        spec.setdefault("horizon", horizon)
        return sublinear.profile_from_spec(spec)
    spec = {"kind": text, "horizon": horizon}
    if text == "power":
        spec["beta"] = args.beta
        spec["c"] = args.c
    return sublinear.profile_from_spec(spec)


def cmd_construct_sublinear(args) -> int:
    model = _resolve_model(args)
    seed = _resolve_seed(args)
    profile = _profile_from_args(args)
    sched = sublinear.build_sublinear_schedule(model, profile, args.t)
    word = sched.sample_word(args.n, substream(seed, 0x5B11, args.n))
    trace = sched.ratio_trace(word)
    counts = occupancy.distinct_counts(np.asarray(word))
    f_vals = profile.values[1 : args.n + 1]
    if args.word_out:
        Path(args.word_out).write_text(_word_line(word), encoding="utf-8")
    if args.format == "json":
        _emit_json(args, {
            "seed": seed,
            "t": sched.t,
            "k_star": sched.k_star,
            "profile": profile.provenance,
            "word": [int(d) for d in word],
            "log_ratio": [float(v) for v in trace.log_ratio],
            "free_part": [float(v) for v in trace.free_part],
            "forced_part": [float(v) for v in trace.forced_part],
            "f": [int(v) for v in f_vals],
            "K": [int(v) for v in sched.K[: args.n]],
            "distinct": [int(v) for v in counts],
        })
    else:
        lines = [
            f"# seed={seed} t={sched.t!r} profile={profile.provenance} "
            f"k_star={sched.k_star} model={model.describe()}",
            "n,log_ratio,free_part,forced_part,f_n,K_n,D_n",
        ]
        for i in range(args.n):
            lines.append(
                f"{i + 1},{float(trace.log_ratio[i])!r},{float(trace.free_part[i])!r},"
                f"{float(trace.forced_part[i])!r},{f_vals[i]},{sched.K[i]},{counts[i]}"
            )
        _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_cylsum(args) -> int:
    model = _resolve_model(args)
    seed = _resolve_seed(args)
    records = []
    bounds = []
    for n in args.n:
        if args.mode == "exact":
            records.append(tilt.cylinder_sum_exact(model, n, args.s, args.theta, args.cap))
        else:
            records.append(
                tilt.cylinder_sum_mc(model, n, args.s, args.theta, args.trials, seed)
            )
        bounds.append(tilt.bound_chain(model, n, args.s, args.theta))
    if args.format == "json":
        _emit_json(args, {
            "seed": seed,
            "records": [
                {
                    "n": r.n, "s": r.s, "theta": r.theta, "mode": r.mode,
                    "value": r.value, "stderr": r.stderr,
                    "truncation_deficit": r.truncation_deficit,
                    "log_zeta": r.log_zeta, "prob": r.prob,
                    "log_binomial_bound": b.log_binomial_bound,
                    "log_sum_bound": b.log_sum_bound,
                }
                for r, b in zip(records, bounds)
            ],
        })
    else:
        body = tilt.cylinder_records_to_csv(records, bounds)
        _emit(args, f"# seed={seed} model={model.describe()}\n" + body)
    return 0


def cmd_verify(args) -> int:
    seed = args.seed if args.seed is not None else DEFAULT_SEED
    report = verify.run_suite(
        args.tier,
        seed=seed,
        threads=max(1, args.threads),
        fail_inject=args.fail_inject,
    )
    if args.format == "json":
        _emit_json(args, {
            "tier": report.tier,
            "seed": report.seed,
            "passed": report.passed,
            "checks": [
                {"name": r.name, "passed": r.passed, "seconds": r.seconds, "detail": r.detail}
                for r in report.results
            ],
        })
    else:
        _emit(args, report.to_text())
    return 0 if report.passed else 4


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except IfsDigitsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
