"""Command-line entry point: ``qmac <group> <command> [options]``.

Exit codes: 0 success, 1 library error, 2 usage error.
Set QMAC_THREADS to evaluate sweep grids on a thread pool; rows are always
emitted in grid order.
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import capacity_region as cr
from . import cv_rates as cv
from . import discrete_mac as dm
from .errors import QmacError, ValidationError
from .formats import grid_points, parse_ensemble, parse_mac, parse_range, parse_scenario, to_csv, to_json
from .gaussian import GOLDEN_T, db_to_r, xp_noise_variances


class UsageError(Exception):
    pass


def _threads() -> int:
    raw = os.environ.get("QMAC_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _ordered_map(fn, items):
    items = list(items)
    n = _threads()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _read(path: str, flag: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"argument {flag}: cannot read {path!r}: {exc.strerror}") from None


def _parse_file(parser, path: str, flag: str):
    text = _read(path, flag)
    try:
        return parser(text)
    except ValidationError as exc:
        raise UsageError(f"argument {flag}: {exc}") from None


def _range_arg(text: str) -> np.ndarray:
    try:
        return parse_range(text)
    except QmacError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


# ---------------------------------------------------------------- discrete

def cmd_verify_code(a):
    phi = dm.named_state(a.state)
    rep = dm.check_code_property(phi, phi.n_qubits)
    rows = [{"mask": m, "entropy": s, "expected": e, "pass": ok} for m, s, e, ok in rep.rows]
    return {"state": a.state, "m": phi.n_qubits, "passed": rep.passed,
            "worst_deviation": rep.worst_deviation}, rows


def cmd_bound(a):
    if a.n < 1 or a.m_max < 1:
        raise UsageError("argument --n/--m-max: must be >= 1")
    rows = []
    for m in range(1, a.m_max + 1):
        b = dm.upper_bound_capacity(dm.HelperChannelSpec(a.n, 1, m))
        rows.append({"m": m, "bound": float(b), "per_use": float(b / m), "exact": str(b)})
    return {"n": a.n, "m_max": a.m_max}, rows


def cmd_symmetric(a):
    r = dm.symmetric_channel_rates()
    return {}, [{"S_mean": r["S_mean"], "S_cond": r["S_cond"], "chi": r["chi"]}]


def cmd_witness(a):
    w = dm.superadditivity_witness(a.n, a.np1, a.np2)
    return {"n": a.n, "n_prime_1": a.np1, "n_prime_2": a.np2}, [w]


# ---------------------------------------------------------------- region

def _load_pair(a, need_second: bool):
    mac = _parse_file(parse_mac, a.channel, "--channel")
    ens = _parse_file(parse_ensemble, a.ensemble, "--ensemble")
    if not need_second:
        return mac, ens, None, None
    if a.channel2 is None:
        raise UsageError("argument --channel2: required for this command")
    mac2 = _parse_file(parse_mac, a.channel2, "--channel2")
    ens2 = _parse_file(parse_ensemble, a.ensemble2, "--ensemble2") if a.ensemble2 else ens
    return mac, ens, mac2, ens2


def _vertex_rows(region):
    return [{"vertex": k, **{f"R{i + 1}": v[i] for i in range(region.n)}}
            for k, v in enumerate(region.vertices)]


def cmd_vertices(a):
    mac, ens, _, _ = _load_pair(a, False)
    region = cr.polymatroid_vertices(cr.rank_function(mac, ens))
    return {"channel": a.channel, "ensemble": a.ensemble}, _vertex_rows(region)


def cmd_check(a):
    mac, ens, _, _ = _load_pair(a, False)
    f = cr.rank_function(mac, ens)
    rep = cr.is_polymatroid(f)
    rows = [{"mask": s, "f": f.values[s]} for s in range(1 << f.n)]
    params = {"channel": a.channel, "ensemble": a.ensemble, "passed": rep.passed,
              "monotone_slack": rep.monotone_slack, "submodular_slack": rep.submodular_slack,
              "violation": rep.first_violation or ""}
    return params, rows


def cmd_sum(a):
    mac, ens, mac2, ens2 = _load_pair(a, True)
    ra = cr.polymatroid_vertices(cr.rank_function(mac, ens))
    rb = cr.polymatroid_vertices(cr.rank_function(mac2, ens2))
    if ra.n != rb.n:
        n = max(ra.n, rb.n)
        ra = cr.polymatroid_vertices(cr.rank_function(cr.pad_senders(mac, n), cr.pad_ensemble(ens, n)))
        rb = cr.polymatroid_vertices(cr.rank_function(cr.pad_senders(mac2, n), cr.pad_ensemble(ens2, n)))
    return {"channel": a.channel, "channel2": a.channel2}, _vertex_rows(cr.minkowski_sum(ra, rb))


def cmd_additivity(a):
    mac, ens, mac2, ens2 = _load_pair(a, True)
    rep = cr.verify_additivity(mac, mac2, ens, ens2)
    row = {"passed": rep.passed, "worst_slack": rep.worst_slack, "rank_sum_error": rep.rank_sum_error,
           "polymatroid": rep.polymatroid_ok, "n_product_vertices": len(rep.product_vertices),
           "n_sum_vertices": len(rep.sum_vertices)}
    return {"channel": a.channel, "channel2": a.channel2}, [row]


# ---------------------------------------------------------------- cv

_BS_KEYS = {"theta", "n_a", "n_b", "encoding", "t_loss", "n_th", "kind", "variant"}
_XP_KEYS = {"R", "r", "sigma2", "sigma2_noise", "t_loss", "n_th", "kind"}


def _scalar(point, key, default=None):
    v = point.get(key, default)
    return float(v) if v is not None and not isinstance(v, str) else v


def cmd_rates(a):
    params = _parse_file(parse_scenario, a.scenario, "--scenario")
    kind = params.get("kind", "xp" if "sigma2" in params else "bs")
    allowed = _BS_KEYS if kind == "bs" else _XP_KEYS if kind == "xp" else None
    if allowed is None:
        raise UsageError(f"argument --scenario: kind must be bs or xp, got {kind!r}")
    unknown = sorted(set(params) - allowed)
    if unknown:
        raise UsageError(f"argument --scenario: unknown keys {unknown}")
    variant = params.get("variant", a.variant)
    points = grid_points({k: v for k, v in params.items() if k not in ("kind", "variant")})

    def run(p):
        if kind == "bs":
            sc = cv.BsScenario(theta=_scalar(p, "theta"), n_a=_scalar(p, "n_a"), n_b=_scalar(p, "n_b", 0.0),
                               encoding=p.get("encoding", "two_mode_entangled"),
                               t_loss=_scalar(p, "t_loss"), n_th=_scalar(p, "n_th", 0.0))
            rep = cv.evaluate_bs(sc, variant)
        else:
            sc = cv.XpScenario(big_r=_scalar(p, "R"), r=_scalar(p, "r"), sigma2=_scalar(p, "sigma2"),
                               sigma2_noise=_scalar(p, "sigma2_noise", 0.0),
                               t_loss=_scalar(p, "t_loss"), n_th=_scalar(p, "n_th", 0.0))
            rep = cv.evaluate_xp(sc)
        row = dict(rep.params)
        row["rate_bits"] = rep.rate_bits
        for name, val in rep.bound_bits.items():
            row[f"bound_{name}"] = val
        return row

    missing = [k for k in (("theta", "n_a") if kind == "bs" else ("R", "r", "sigma2")) if k not in params]
    if missing:
        raise UsageError(f"argument --scenario: missing keys {missing}")
    echo = {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in params.items()}
    echo["variant"] = variant
    return echo, _ordered_map(run, points)


def cmd_demarcation(a):
    def run(nb):
        roots = cv.demarcation_theta(a.na, float(nb), a.variant)
        return {"n_b": float(nb), "n_crossings": len(roots),
                "theta_cross": roots[0] if roots else None,
                "theta_upper": roots[-1] if roots else None}
    return {"n_a": a.na, "variant": a.variant}, _ordered_map(run, a.nb_grid)


def cmd_demarcation_min(a):
    def run(na):
        m = cv.demarcation_minimum(float(na), a.variant)
        return {"n_a": float(na), "n_b_min": m.n_b_min, "theta": m.theta}
    return {"variant": a.variant}, _ordered_map(run, a.na)


def cmd_threshold(a):
    th = cv.min_squeezing_threshold(a.na, a.theta, a.tloss, a.nth, a.variant)
    row = {"exists": th is not None, "db": th.db if th else None, "r": th.r if th else None,
           "n_b": th.n_b if th else None}
    return {"theta": a.theta, "n_a": a.na, "t_loss": a.tloss, "n_th": a.nth, "variant": a.variant}, [row]


def cmd_cutoff(a):
    t = cv.loss_cutoff(a.na, a.theta, a.nth, a.variant)
    return {"theta": a.theta, "n_a": a.na, "n_th": a.nth, "variant": a.variant}, \
        [{"exists": t is not None, "t_cutoff": t}]


def cmd_xp_noise(a):
    s1, s2 = xp_noise_variances(a.t, a.eta, db_to_r(a.sdb))
    return {"t": a.t, "eta": a.eta, "s_db": a.sdb}, [{"sigma1_2": s1, "sigma2_2": s2, "sigma2_noise": s1 + s2}]


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="write to this path instead of stdout")

    p = argparse.ArgumentParser(prog="qmac", description="Capacity tools for quantum multi-access channels.")
    groups = p.add_subparsers(dest="group", required=True)

    def leaf(sub, name, fn, help_):
        q = sub.add_parser(name, parents=[common], help=help_)
        q.set_defaults(func=fn, command=f"{sub.group_name} {name}")
        return q

    d = groups.add_parser("discrete", help="discrete helper-sender channels")
    ds = d.add_subparsers(dest="cmd", required=True)
    ds.group_name = "discrete"
    q = leaf(ds, "verify-code", cmd_verify_code, "entropy after depolarizing each qubit subset")
    q.add_argument("--state", choices=("zero", "bell", "code5"), required=True)
    q = leaf(ds, "bound", cmd_bound, "binomial capacity upper bound per number of uses")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--m-max", type=int, required=True)
    leaf(ds, "symmetric", cmd_symmetric, "Holevo quantity of the symmetric channel protocol")
    q = leaf(ds, "witness-IIIE", cmd_witness, "dense-coding rate versus regularized bounds")
    q.add_argument("--n", type=int, default=10)
    q.add_argument("--np1", type=int, default=9)
    q.add_argument("--np2", type=int, default=1)

    r = groups.add_parser("region", help="classical capacity regions")
    rs = r.add_subparsers(dest="cmd", required=True)
    rs.group_name = "region"
    for name, fn, h in (("vertices", cmd_vertices, "polymatroid vertices"),
                        ("check", cmd_check, "polymatroid conditions of the rank function"),
                        ("sum", cmd_sum, "Minkowski sum of two regions"),
                        ("additivity", cmd_additivity, "product-channel region vs Minkowski sum")):
        q = leaf(rs, name, fn, h)
        q.add_argument("--channel", required=True)
        q.add_argument("--ensemble", required=True)
        q.add_argument("--channel2")
        q.add_argument("--ensemble2", help="ensemble for --channel2 (defaults to --ensemble)")

    c = groups.add_parser("cv", help="Gaussian rates and thresholds")
    cs = c.add_subparsers(dest="cmd", required=True)
    cs.group_name = "cv"

    def variant_arg(q):
        q.add_argument("--variant", choices=cv.VARIANTS, default=cv.DEFAULT_VARIANT)

    q = leaf(cs, "rates", cmd_rates, "rate report over a scenario grid")
    q.add_argument("--scenario", required=True)
    variant_arg(q)
    q = leaf(cs, "demarcation", cmd_demarcation, "crossing angles over an N_B grid")
    q.add_argument("--na", type=float, required=True)
    q.add_argument("--nb-grid", type=_range_arg, required=True)
    variant_arg(q)
    q = leaf(cs, "demarcation-min", cmd_demarcation_min, "least N_B with a crossing, and its angle")
    q.add_argument("--na", type=_range_arg, required=True)
    variant_arg(q)
    q = leaf(cs, "threshold", cmd_threshold, "minimal squeezing beating the product bound")
    q.add_argument("--theta", type=float, required=True)
    q.add_argument("--na", type=float, required=True)
    q.add_argument("--tloss", type=float, default=1.0)
    q.add_argument("--nth", type=float, default=0.0)
    variant_arg(q)
    q = leaf(cs, "cutoff", cmd_cutoff, "largest loss transmissivity without enhancement")
    q.add_argument("--theta", type=float, required=True)
    q.add_argument("--na", type=float, required=True)
    q.add_argument("--nth", type=float, default=0.0)
    variant_arg(q)
    q = leaf(cs, "xp-noise", cmd_xp_noise, "noise variances of the measurement-induced XP gate")
    q.add_argument("--t", type=float, default=GOLDEN_T)
    q.add_argument("--eta", type=float, default=0.98)
    q.add_argument("--sdb", type=float, default=10.0)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        params, rows = args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"qmac: error: {exc}", file=sys.stderr)
        return 2
    except QmacError as exc:
        print(f"qmac: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    text = to_json(args.command, params, rows) if args.format == "json" else to_csv(rows)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"qmac: error: argument --out: {exc.strerror}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None) -> int:
    try:
        return run(argv)
    except SystemExit as exc:  # argparse exits with 2 on usage errors, 0 on --help
        code = exc.code if isinstance(exc.code, int) else 2
        return code if code in (0, 2) else 2


if __name__ == "__main__":
    sys.exit(main())
