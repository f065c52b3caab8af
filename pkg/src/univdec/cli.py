"""Command line interface: ``univdec <command> --config FILE``.

Exit codes: 0 when every check passes, 1 when a checked inequality fails,
2 for configuration or input errors (including an exceeded enumeration cap).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from ._util import DEFAULT_CAP, OFF_SUPPORT, CheckReport, EnumerationCapError, VerificationError
from .config import ConfigError, load_config, parse_config, parse_rate_function
from .families import degenerate_fsm_family
from .metrics import MetricFamily, TableMetric
from .pairwise import canonical_from_pem, pairwise_error_mc, pem_table
from .plotdata import PlotDataError, write_plotdata
from .ratefn import (
    asymptotic_condition_check, canonical_rate_function, certify_rate_function, certify_tightness,
    check_order_preservation, check_upper_bound_property,
)
from .reports import REPORT_COLUMNS, RunManifest, write_csv, write_json
from .sequences import all_sequences, rank, unrank
from .simulator import (
    avg_error_exact, avg_error_mc, codebook_size, family_end_to_end_check, sandwich_check,
    union_clip_bound,
)
from .universal import (
    approx_conditions_check, gmet_table, merged_family_bound, redundancy,
    theorem1_check, u1_table, u2_table, u2_tightness_check,
)

SUITES = ("lemma1", "theorem1", "ratefn", "merged", "tightness")


class CommandFailed(Exception):
    """A command finished but at least one of its checks failed."""


def _seq(s):
    return "".join(str(int(v)) for v in s)


def _cap(args, cfg_cap):
    env = os.environ.get("UNIVDEC_CAP")
    cap = int(env) if env else cfg_cap
    if cap > DEFAULT_CAP and not args.allow_large_enumeration:
        raise ConfigError("enumeration_cap", f"{cap} exceeds the default {DEFAULT_CAP}; "
                          "pass --allow-large-enumeration to acknowledge")
    return cap


def _load(args, need_channel=False):
    cfg = load_config(args.config, args.blocklength, args.mode)
    cfg.enumeration_cap = _cap(args, cfg.enumeration_cap)
    if args.seed is not None:
        cfg.seeds = [args.seed]
    if need_channel and cfg.channel is None:
        raise ConfigError("channel", f"the {args.command} command needs a channel")
    return cfg


def _out(args, name):
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def _labels(family):
    return [getattr(m, "label", None) or f"m{i}" for i, m in enumerate(family)]


# ---------------------------------------------------------------- commands

def cmd_pairwise(args, cfg, manifest):
    ys = all_sequences(cfg.y_size, cfg.n, cfg.enumeration_cap)
    xs = all_sequences(cfg.x_size, cfg.n, cfg.enumeration_cap)
    rows = []
    for label, metric in zip(_labels(cfg.family), cfg.family):
        if cfg.mode == "exact":
            t = pem_table(cfg.prior, metric, cfg.y_size, cfg.enumeration_cap)
            for i, x in enumerate(xs):
                for j, y in enumerate(ys):
                    p = t[i, j]
                    c = canonical_from_pem(p, cfg.n)
                    rows.append({"metric": label, "x": _seq(x), "y": _seq(y), "pem": p,
                                 "canonical": None if c is OFF_SUPPORT else c})
        else:
            for i, x in enumerate(xs):
                for j, y in enumerate(ys):
                    r = pairwise_error_mc(cfg.prior, metric, x, y, cfg.trials, [cfg.seeds[0], i, j])
                    rows.append({"metric": label, "x": _seq(x), "y": _seq(y), "pem": r.value,
                                 "ci": r.ci_halfwidth})
    cols = ("metric", "x", "y", "pem", "canonical") if cfg.mode == "exact" else ("metric", "x", "y", "pem", "ci")
    manifest.outputs += [write_csv(_out(args, "pairwise.csv"), rows, cols),
                         write_json(_out(args, "pairwise.json"), {"n": cfg.n, "mode": cfg.mode, "rows": rows})]
    print(f"pairwise: {len(rows)} rows written to {args.out}")


def cmd_gmet(args, cfg, manifest):
    g = gmet_table(cfg.prior, cfg.family, cfg.y_size, cfg.enumeration_cap)
    labels = _labels(cfg.family)
    xs = all_sequences(cfg.x_size, cfg.n, cfg.enumeration_cap)
    ys = all_sequences(cfg.y_size, cfg.n, cfg.enumeration_cap)
    rows = []
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            u = g.universal_metric(i, j)
            rows.append({"x": _seq(x), "y": _seq(y), "gmet": g[i, j],
                         "U_n": None if u is OFF_SUPPORT else u, "argmin": labels[int(g.argmin[i, j])]})
    manifest.outputs += [write_csv(_out(args, "gmet.csv"), rows, ("x", "y", "gmet", "U_n", "argmin")),
                         write_json(_out(args, "gmet.json"), {"n": cfg.n, "rows": rows})]
    print(f"gmet: {len(rows)} rows, family size {len(cfg.family)}")


def _redundancy_dict(rep):
    return {"n": rep.n, "K": rep.K, "slack_per_symbol": rep.slack, "argmax_y": _seq(rep.argmax_y),
            "lower_bound": rep.lower_bound,
            "per_y": {_seq(y): v for y, v in zip(rep.ys, rep.per_y)}}


def cmd_redundancy(args, cfg, manifest):
    rep = redundancy(cfg.prior, cfg.family, cfg.y_size, cfg.enumeration_cap)
    manifest.outputs.append(write_json(_out(args, "redundancy.json"), _redundancy_dict(rep)))
    print(f"redundancy: n={rep.n} K_n={rep.K} (1/n)log2 K_n={rep.slack:.6g} at y={_seq(rep.argmax_y)}")


def _run_checks(checks):
    """Run named check thunks, collecting reports; failures are recorded, not raised."""
    results, failed = [], False
    for name, thunk in checks:
        try:
            rep = thunk()
            passed, body = rep.passed, rep.as_dict()
        except VerificationError as exc:
            passed = False
            body = exc.report.as_dict() if exc.report is not None else {"witness": exc.witness}
            body["error"] = str(exc)
        failed |= not passed
        results.append({"check": name, "passed": passed, **{k: v for k, v in body.items()
                                                              if k not in ("pe_u", "u2", "pe_u2", "normality")}})
        print(f"  {'PASS' if passed else 'FAIL'}  {name}")
    return results, failed


def suite_checks(suite, cfg):
    p, fam, cap = cfg.prior, cfg.family, cfg.enumeration_cap
    if suite == "lemma1":
        if cfg.channel is None:
            raise ConfigError("channel", "the lemma1 suite needs a channel")
        rates = [Fraction(r) for r in cfg.raw.get("rates", [])] or [cfg.rate]
        decs = list(zip(_labels(fam), fam))
        if len(fam) > 1:
            decs.append(("gmet", gmet_table(p, fam, cfg.y_size, cap).as_metric()))
        return [(f"sandwich[{lab}, R={r}]", lambda m=m, r=r: sandwich_check(p, cfg.channel, m, r, cap))
                for r in rates for lab, m in decs]
    if suite == "theorem1":
        return [("gmet domination", lambda: theorem1_check(p, fam, y_size=cfg.y_size, cap=cap))]
    if suite == "ratefn":
        R = parse_rate_function(cfg)
        omega = canonical_rate_function(p, R, cap)
        return [("R is a rate function", lambda: certify_rate_function(p, R, cap)),
                ("Omega_R is a rate function", lambda: certify_rate_function(p, omega, cap)),
                ("Omega_R is tight", lambda: certify_tightness(p, omega, 0, cap)),
                ("order preservation", lambda: check_order_preservation(p, R, cap)),
                ("R <= Omega_R", lambda: check_upper_bound_property(p, R, cap)),
                ("asymptotic condition", lambda: asymptotic_condition_check(p, R, cap))]
    if suite == "merged":
        def approx(which):
            t = (u1_table if which == "u1" else u2_table)(p, fam, cfg.y_size, cap)
            return approx_conditions_check(p, fam, t, cfg.y_size, cap)
        return [("merged family bound", lambda: merged_family_bound(p, fam, cfg.y_size, cap)),
                ("U_n,1 approximation slacks", lambda: approx("u1")),
                ("U_n,2 approximation slacks", lambda: approx("u2"))]
    if suite == "tightness":
        checks = [("U_n,2 tightness", lambda: u2_tightness_check(p, fam, cfg.y_size, cap))]
        if cfg.channel is not None:
            checks.append(("GMET end to end", lambda: family_end_to_end_check(p, cfg.channel, fam, cfg.rate, cap)))
        return checks
    raise ConfigError("suite", f"unknown suite {suite!r}")


def cmd_verify(args, cfg, manifest):
    print(f"verify --suite {args.suite}")
    results, failed = _run_checks(suite_checks(args.suite, cfg))
    manifest.outputs.append(write_json(_out(args, f"verify_{args.suite}.json"),
                                       {"suite": args.suite, "passed": not failed, "checks": results}))
    if failed:
        raise CommandFailed(f"suite {args.suite} failed")


def _decoders(cfg, with_u2=False):
    fam, cap = cfg.family, cfg.enumeration_cap
    decs = list(zip(_labels(fam), fam))
    if len(fam) > 1 or with_u2:
        g = gmet_table(cfg.prior, fam, cfg.y_size, cap)
        decs.append(("gmet", g.as_metric()))
        if with_u2:
            u2 = u2_table(cfg.prior, fam, cfg.y_size, cap)
            decs.append(("u2", TableMetric(-u2.num, cfg.x_size, cfg.y_size, label="u2")))
    return decs


def simulate_rows(cfg, instance="run", jobs=1, with_u2=False):
    """One report row per (rate, decoder)."""
    rates = [Fraction(r) for r in cfg.raw.get("rates", [])] or [cfg.rate]
    rep = redundancy(cfg.prior, cfg.family, cfg.y_size, cfg.enumeration_cap) if len(cfg.family) > 1 else None
    rows = []
    for R in rates:
        M = codebook_size(cfg.n, R)
        for label, metric in _decoders(cfg, with_u2):
            row = {"instance": instance, "metric": label, "decoder": label if label in ("gmet", "u2") else "member",
                   "n": cfg.n, "R": R, "M": M}
            if label == "gmet" and rep is not None:
                row.update(K_n=rep.K, slack_per_symbol=rep.slack)
            if cfg.mode == "exact":
                pe = avg_error_exact(cfg.prior, cfg.channel, metric, R, cfg.enumeration_cap)
                ub = union_clip_bound(cfg.prior, cfg.channel, metric, R, cfg.enumeration_cap)
                row.update(P_e_exact=pe, union_clip=ub, sandwich_ratio=pe / ub if ub else Fraction(1))
            else:
                est = avg_error_mc(cfg.prior, cfg.channel, metric, R, cfg.trials, cfg.seeds[0],
                                   cfg.tie_break, jobs=jobs)
                row.update(P_e_mc=est.value, ci=est.ci_halfwidth)
            rows.append(row)
    return rows


def cmd_simulate(args, cfg, manifest):
    stem = os.path.splitext(os.path.basename(args.config))[0]
    rows = simulate_rows(cfg, stem, args.jobs)
    for r in rows:
        pe = r.get("P_e_exact", r.get("P_e_mc"))
        print(f"  {r['metric']:>16}  R={r['R']}  M={r['M']}  P_e={float(pe):.6g}")
    manifest.outputs += [write_csv(_out(args, "report.csv"), rows, REPORT_COLUMNS),
                         write_json(_out(args, "report.json"), {"config_hash": cfg.config_hash,
                                                               "mode": cfg.mode, "rows": rows})]


DEMO_FSC_CONFIG = {
    "blocklength": 6,
    "alphabets": {"x": 2, "y": 2},
    "prior": {"type": "iid", "probs": ["1/2", "1/2"]},
    "channel": {"type": "fsc", "next_state": [[[0, 1], [1, 0]], [[0, 1], [1, 0]]],
                "emissions": [[["0.95", "0.05"], ["0.05", "0.95"]], [["0.7", "0.3"], ["0.3", "0.7"]]],
                "initial_state": 0},
    "family": {"type": "fsm_sampled", "states": 2, "samples": 6, "seed": 3},
    "rate": "1/3",
    "trials": 10000,
    "seeds": [0],
}


def demo_fsc(cfg, jobs=1, log=print):
    """Finite-state family demo: returns a dict of results and the list of check reports."""
    p, cap, n = cfg.prior, cfg.enumeration_cap, cfg.n
    checks = []
    log(f"sampled family: {len(cfg.family)} two-state metrics, n={n}, R={cfg.rate}")
    end = family_end_to_end_check(p, cfg.channel, cfg.family, cfg.rate, cap)
    checks.append(("sampled: P_e(GMET) <= 2 K_n min_theta P_e(theta)", end))
    best = min(end.details["P_members"])
    u2 = u2_table(p, cfg.family, cfg.y_size, cap)
    p_u2 = avg_error_exact(p, cfg.channel, TableMetric(-u2.num, cfg.x_size, cfg.y_size), cfg.rate, cap)
    log(f"  K_n = {end.details['K']} ; P_e(GMET) = {float(end.details['P_gmet']):.6g} ; "
        f"best member {float(best):.6g}")
    log(f"  U_n,2 decoder P_e = {float(p_u2):.6g}")

    single = MetricFamily((cfg.family[0],))
    g1 = gmet_table(p, single, cfg.y_size, cap)
    u21 = u2_table(p, single, cfg.y_size, cap)
    trio = [avg_error_exact(p, cfg.channel, m, cfg.rate, cap) for m in
            (cfg.family[0], g1.as_metric(), TableMetric(-u21.num, cfg.x_size, cfg.y_size))]
    # GMET over one member is order-equivalent to it on a full-support prior.
    # U_n,2 ranks by equality-class mass instead, so it is reported, not asserted.
    checks.append(("singleton control: member and GMET coincide",
                   CheckReport("singleton-control", trio[0] == trio[1], trio[1], None, None,
                               P_member=trio[0], P_gmet=trio[1], P_u2=trio[2])))
    log(f"  singleton control: member {float(trio[0]):.6g}, GMET {float(trio[1]):.6g}, U_n,2 {float(trio[2]):.6g}")

    pairs = cfg.raw.get("degenerate_pairs")
    degen = degenerate_fsm_family(n, cfg.x_size, cfg.y_size, pairs, cap)
    log(f"degenerate family: {len(degen)} machines with |S| = n")
    g = gmet_table(p, degen, cfg.y_size, cap)
    w, den = p.weights(cap)
    if pairs is None:
        cells = [(i, j) for i in range(g.probs.shape[0]) for j in range(g.probs.shape[1])]
    else:
        cells = [(rank(a, cfg.x_size), rank(b, cfg.y_size)) for a, b in pairs]
    bad = next(((i, j) for i, j in cells if g[i, j] != Fraction(int(w[i]), den)), None)
    ok_q = bad is None
    target = None if ok_q else (unrank(bad[0], cfg.x_size, n), unrank(bad[1], cfg.y_size, n))
    checks.append(("degenerate: GMET(x, y) = Q(x)",
                   CheckReport("degenerate-gmet", ok_q, None, None, target, cells=len(cells))))
    M = codebook_size(n, cfg.rate)
    est = avg_error_mc(p, cfg.channel, g.as_metric(), cfg.rate, cfg.trials, cfg.seeds[0], jobs=jobs)
    floor = 1 - Fraction(1, M) - Fraction(1, 20)
    checks.append((f"degenerate: MC error >= 1 - 1/M - 0.05 over {cfg.trials} trials",
                   CheckReport("degenerate-mc", est.value >= floor, est.value, None, None,
                               ci=est.ci_halfwidth, floor=floor)))
    log(f"  GMET error rate {est.value:.4f} +/- {est.ci_halfwidth:.4f} (M={M}, floor {float(floor):.4f})")
    rnd = avg_error_mc(p, cfg.channel, g.as_metric(), cfg.rate, cfg.trials, cfg.seeds[0], "random", jobs=jobs)
    log(f"  with random tie-breaking {rnd.value:.4f} +/- {rnd.ci_halfwidth:.4f} (1 - 1/M = {1 - 1 / M:.4f})")
    red = redundancy(p, cfg.family, cfg.y_size, cap)
    rows = [{"instance": "sampled", "metric": lab, "decoder": "member", "n": n, "R": cfg.rate, "M": M,
             "P_e_exact": v} for lab, v in zip(_labels(cfg.family), end.details["P_members"])]
    rows += [{"instance": "sampled", "metric": "gmet", "decoder": "gmet", "n": n, "R": cfg.rate, "M": M,
              "P_e_exact": end.details["P_gmet"], "K_n": red.K, "slack_per_symbol": red.slack},
             {"instance": "sampled", "metric": "u2", "decoder": "u2", "n": n, "R": cfg.rate, "M": M,
              "P_e_exact": p_u2},
             {"instance": "degenerate", "metric": "gmet", "decoder": "gmet", "n": n, "R": cfg.rate, "M": M,
              "P_e_mc": est.value, "ci": est.ci_halfwidth},
             {"instance": "degenerate", "metric": "gmet-random-ties", "decoder": "gmet", "n": n, "R": cfg.rate,
              "M": M, "P_e_mc": rnd.value, "ci": rnd.ci_halfwidth}]
    return {"K_n": end.details["K"], "slack_per_symbol": red.slack, "P_gmet": end.details["P_gmet"],
            "P_u2": p_u2, "P_members": end.details["P_members"], "singleton": trio,
            "degenerate_mc": est, "degenerate_mc_random_ties": rnd, "M": M, "rows": rows}, checks


def cmd_demo_fsc(args, cfg, manifest):
    results, checks = demo_fsc(cfg, args.jobs)
    rows, failed = _run_checks([(name, lambda r=r: r) for name, r in checks])
    manifest.outputs += [write_json(_out(args, "demo_fsc.json"), {"results": results, "checks": rows}),
                         write_csv(_out(args, "demo_fsc.csv"), results["rows"], REPORT_COLUMNS)]
    if failed:
        raise CommandFailed("demo-fsc checks failed")


def cmd_plotdata(args, manifest):
    manifest.outputs += write_plotdata(args.reports, args.out)
    print(f"plotdata: wrote {len(manifest.outputs)} files to {args.out}")


# ---------------------------------------------------------------- parser

def build_parser():
    parser = argparse.ArgumentParser(prog="univdec", description="GMET universal decoding toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required, help="experiment JSON file")
        p.add_argument("--mode", choices=("exact", "mc"), help="override the config mode")
        p.add_argument("--seed", type=int, help="override the config seeds with one seed")
        p.add_argument("--jobs", type=int, default=1, help="worker threads for Monte Carlo")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--blocklength", type=int, help="override the config blocklength")
        p.add_argument("--allow-large-enumeration", action="store_true",
                       help=f"acknowledge an enumeration cap above {DEFAULT_CAP}")
        return p

    common(sub.add_parser("pairwise", help="pairwise error table for each family member"))
    common(sub.add_parser("gmet", help="GMET table and universal metric"))
    common(sub.add_parser("redundancy", help="redundancy K_n and its per-symbol slack"))
    v = common(sub.add_parser("verify", help="run a verification suite"))
    v.add_argument("--suite", required=True, choices=SUITES)
    common(sub.add_parser("simulate", help="average error probability per decoder"))
    common(sub.add_parser("demo-fsc", help="finite-state family demonstration"), config_required=False)
    pd = sub.add_parser("plotdata", help="CSV series and SVG charts from report files")
    pd.add_argument("reports", nargs="*", help="redundancy JSON or report CSV files")
    pd.add_argument("--out", default="plots")
    return parser


COMMANDS = {"pairwise": cmd_pairwise, "gmet": cmd_gmet, "redundancy": cmd_redundancy,
            "verify": cmd_verify, "simulate": cmd_simulate, "demo-fsc": cmd_demo_fsc}


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    if args.command == "plotdata":
        manifest = RunManifest("plotdata", None, [], argv=argv)
        try:
            cmd_plotdata(args, manifest)
        except (PlotDataError, OSError, ValueError, json.JSONDecodeError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        manifest.finish("pass", args.out)
        return 0
    try:
        if args.command == "demo-fsc" and args.config is None:
            cfg = parse_config(DEMO_FSC_CONFIG, args.blocklength, args.mode)
            cfg.enumeration_cap = _cap(args, cfg.enumeration_cap)
            if args.seed is not None:
                cfg.seeds = [args.seed]
        else:
            cfg = _load(args, need_channel=args.command in ("simulate", "demo-fsc"))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    manifest = RunManifest(args.command, cfg.config_hash, cfg.seeds, argv=argv)
    try:
        COMMANDS[args.command](args, cfg, manifest)
    except (ConfigError, EnumerationCapError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        manifest.finish("config-error", args.out if os.path.isdir(args.out) else None)
        return 2
    except (CommandFailed, VerificationError) as exc:
        print(f"FAILED: {exc}", file=sys.stderr)
        manifest.finish("fail", _ensure(args.out))
        return 1
    manifest.finish("pass", _ensure(args.out))
    return 0


def _ensure(path):
    os.makedirs(path, exist_ok=True)
    return path


if __name__ == "__main__":
    sys.exit(main())
