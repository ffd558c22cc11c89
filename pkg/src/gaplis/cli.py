"""Command-line entry point wiring samplers, solvers, transforms, limits,
the exact oracle and the Monte Carlo harness.

Exit codes: 0 on success (including verification PASS), 1 on verification
FAIL, 2 on usage errors (bad flags, missing or malformed files).  Every
run is reproducible from its flags: all randomness flows from --seed and
--stream.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

from . import couplings, mc, model, oracle, report
from .hammersley import build_lines_continuous, build_lines_discrete
from .limits import (
    TracyWidomTable,
    f_gap_limit,
    f_limit,
    g_gap_limit,
    g_limit,
    regime_limit,
    report_sandwich,
    sigma_gap_continuous,
    sigma_gap_discrete,
    solve_alpha_beta,
)
from .parallel import default_workers
from .sampling import SeedSpec, sample_bernoulli, sample_geometric, sample_poisson
from .solvers import gap_lis_continuous, gap_lis_discrete, lpp_geometric

USAGE_ERROR = 2


def _seed(args) -> SeedSpec:
    return SeedSpec(args.seed, args.stream)


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="gaplis",
        description="Gap-constrained longest increasing paths: sample, solve, couple, verify.",
    )
    sub = ap.add_subparsers(dest="cmd", required=True)

    # ------------------------------------------------------------- sample
    sp = sub.add_parser("sample", help="draw seeded random fields and write them to disk")
    ssub = sp.add_subparsers(dest="what", required=True)
    p_po = ssub.add_parser("poisson", help="Poisson cloud on (0,x)x(0,t); CSV with header x,y")
    p_po.add_argument("--x", type=float, required=True)
    p_po.add_argument("--t", type=float, required=True)
    p_po.add_argument("--lam", type=float, default=1.0)
    p_be = ssub.add_parser("bernoulli", help="i.i.d. Bernoulli(p) bits; text grid of 0/1 rows")
    p_ge = ssub.add_parser("geometric", help="i.i.d. geometric(p) weights, P(w=k)=p^k(1-p); CSV rows")
    for q in (p_be, p_ge):
        q.add_argument("--m", type=int, required=True)
        q.add_argument("--n", type=int, required=True)
        q.add_argument("--p", type=float, required=True)
    for q in (p_po, p_be, p_ge):
        q.add_argument("--seed", type=int, required=True)
        q.add_argument("--stream", type=int, default=0)
        q.add_argument("--out", required=True)

    # -------------------------------------------------------------- solve
    sv = sub.add_parser("solve", help="exact path lengths on a stored field")
    vsub = sv.add_subparsers(dest="what", required=True)
    v_c = vsub.add_parser(
        "continuous",
        help="longest chain with x-gaps h1, y-gaps h2 through a point cloud",
    )
    v_c.add_argument("--points", required=True)
    v_c.add_argument("--x", type=float, default=None)
    v_c.add_argument("--t", type=float, default=None)
    v_d = vsub.add_parser(
        "discrete", help="longest gapped non-decreasing path through the 1-cells of a bit field"
    )
    v_d.add_argument("--field", required=True)
    for q in (v_c, v_d):
        q.add_argument("--h1", type=float, required=True)
        q.add_argument("--h2", type=float, required=True)
        q.add_argument("--witness", action="store_true")
        q.add_argument("--out", default=None)
    v_l = vsub.add_parser(
        "lpp", help="last-passage time max over North/East paths of summed weights"
    )
    v_l.add_argument("--weights", required=True)
    v_l.add_argument("--witness", action="store_true")
    v_l.add_argument("--out", default=None)

    # -------------------------------------------------------------- lines
    ln = sub.add_parser(
        "lines",
        help="staircase line decomposition; the line count over a region equals the gapped length",
    )
    ln.add_argument("--points", default=None)
    ln.add_argument("--field", default=None)
    ln.add_argument("--h1", type=float, required=True)
    ln.add_argument("--h2", type=float, required=True)
    ln.add_argument("--out", required=True)
    ln.add_argument("--figure", default=None, help="optional PNG of the staircases")

    # ------------------------------------------------------------- couple
    cp = sub.add_parser("couple", help="constructive transforms and identity verification")
    csub = cp.add_subparsers(dest="what", required=True)
    c_dc = csub.add_parser(
        "dilate-cont",
        help="dilate a cloud by gap x chain level; plain length at (x,t) = gapped length at the image",
    )
    c_dc.add_argument("--points", required=True)
    c_dc.add_argument("--h1", type=float, required=True)
    c_dc.add_argument("--h2", type=float, required=True)
    c_dd = csub.add_parser(
        "dilate-disc",
        help="lattice dilatation along the unit-gap table (h1, h2 >= 1), refill with Bernoulli bits",
    )
    c_dd.add_argument("--field", required=True)
    c_dd.add_argument("--h1", type=int, required=True)
    c_dd.add_argument("--h2", type=int, required=True)
    c_dd.add_argument("--p", type=float, required=True)
    c_ps = csub.add_parser(
        "psi", help="project the (h,1) model onto (h,0) by collapsing vertical fibers"
    )
    c_ps.add_argument("--field", required=True)
    c_ps.add_argument("--h", type=int, required=True)
    c_cl = csub.add_parser(
        "clump",
        help="sum staircase-corner cells along diagonal fibers into geometric weights",
    )
    c_cl.add_argument("--field", required=True)
    for q in (c_dc, c_dd):
        q.add_argument("--aux-seed", type=int, required=True)
        q.add_argument("--aux-stream", type=int, default=0)
    for q in (c_dc, c_dd, c_ps, c_cl):
        q.add_argument("--out", required=True)
    c_vf = csub.add_parser(
        "verify",
        help="Monte Carlo check of a distributional identity, both sides sampled independently",
    )
    c_vf.add_argument("--identity", choices=couplings.IDENTITIES, required=True)
    c_vf.add_argument("--x", type=float, default=None)
    c_vf.add_argument("--t", type=float, default=None)
    c_vf.add_argument("--m", type=int, default=None)
    c_vf.add_argument("--n", type=int, default=None)
    c_vf.add_argument("--p", type=float, default=None)
    c_vf.add_argument("--h1", type=float, default=0)
    c_vf.add_argument("--h2", type=float, default=0)
    c_vf.add_argument("--kmax", type=int, required=True)
    c_vf.add_argument("--n-replicas", type=int, required=True)
    c_vf.add_argument("--seed", type=int, required=True)
    c_vf.add_argument("--threads", type=int, default=None)
    c_vf.add_argument("--out", default=None)

    # -------------------------------------------------------------- limit
    lm = sub.add_parser("limit", help="closed-form limit constants and fluctuation scales")
    lsub = lm.add_subparsers(dest="what", required=True)
    l_f = lsub.add_parser("f", help="plain continuous limit 2 sqrt(ab)")
    l_fh = lsub.add_parser("fh", help="gapped continuous limit: root of lam = 2 sqrt((a-h1 lam)(b-h2 lam))")
    l_sc = lsub.add_parser("sigma-cont", help="continuous cube-root fluctuation scale")
    l_g = lsub.add_parser("g", help="last-passage limit sqrt(p)(2 sqrt(ab)+(a+b) sqrt(p))/(1-p)")
    l_gh = lsub.add_parser("gh", help="gapped lattice limit: fixed point of lam = g(a-h1 lam, b-h2 lam), flat edges a/h1, b/h2")
    l_abt = lsub.add_parser("alphabeta", help="the unique (alpha,beta) with alpha+h1 g=a, beta+h2 g=b")
    l_sd = lsub.add_parser("sigma-disc", help="lattice fluctuation scale on the critical ray a/h1=b/h2")
    l_sw = lsub.add_parser("sandwich", help="CDF bounds for standardized fluctuations off the critical ray")
    l_rg = lsub.add_parser("regime", help="three-way limit when gaps and intensity vary with t")
    for q in (l_f, l_fh, l_sc, l_g, l_gh, l_abt, l_sd, l_sw, l_rg):
        q.add_argument("--a", type=float, default=1.0)
        q.add_argument("--b", type=float, default=1.0)
    for q in (l_fh, l_sc, l_gh, l_abt, l_sd, l_sw):
        q.add_argument("--h1", type=float, required=True)
        q.add_argument("--h2", type=float, required=True)
    for q in (l_g, l_gh, l_abt, l_sd, l_sw):
        q.add_argument("--p", type=float, required=True)
    l_sw.add_argument("--x", type=float, required=True)
    l_sw.add_argument("--tw-table", required=True)
    l_rg.add_argument("--c", required=True, help="limit of h_t sqrt(lam_t); a number or 'inf'")

    # ------------------------------------------------------------- oracle
    orc = sub.add_parser("oracle", help="exact small-instance verification by full enumeration")
    osub = orc.add_subparsers(dest="what", required=True)
    o_v = osub.add_parser(
        "verify",
        help="exact identity check: gapped-length CDF vs the coupled model at translated corners",
    )
    o_v.add_argument(
        "--identity",
        choices=["gap-vs-lpp", "gap-vs-unit"],
        required=True,
        help="gap-vs-lpp: P(len<=k)=P(T at (m-h1 k, n-h2 k)<=k); "
        "gap-vs-unit: P(len<=k)=P(unit-gap len at (m-(h1-1)k, n-(h2-1)k)<=k)",
    )
    o_v.add_argument("--m", type=int, required=True)
    o_v.add_argument("--n", type=int, required=True)
    o_v.add_argument("--h1", type=int, required=True)
    o_v.add_argument("--h2", type=int, required=True)
    o_v.add_argument("--p", required=True, help="success probability, exact fraction like 1/2")
    o_v.add_argument("--kmax", type=int, required=True)
    o_v.add_argument("--out", default=None)

    # ----------------------------------------------------------------- mc
    mcp = sub.add_parser("mc", help="Monte Carlo experiments from a JSON spec")
    msub = mcp.add_subparsers(dest="what", required=True)
    m_r = msub.add_parser("run", help="run the experiment spec and emit CSV + figure + JSON")
    m_r.add_argument("--spec", required=True)
    m_r.add_argument("--out", required=True, help="output path prefix")
    m_r.add_argument("--threads", type=int, default=None)
    m_r.add_argument("--no-figures", action="store_true")

    return ap


# ---------------------------------------------------------------------------
# Command handlers
# ---------------------------------------------------------------------------

def _cmd_sample(args) -> int:
    if args.what == "poisson":
        cloud = sample_poisson((args.x, args.t), args.lam, _seed(args))
        model.write_cloud_csv(cloud, args.out)
        print(f"wrote {len(cloud)} points to {args.out}")
    elif args.what == "bernoulli":
        fld = sample_bernoulli(args.m, args.n, args.p, _seed(args))
        model.write_bitfield(fld, args.out)
        print(f"wrote {fld.m} x {fld.n} bit field to {args.out}")
    else:
        fld = sample_geometric(args.m, args.n, args.p, _seed(args))
        model.write_weightfield(fld, args.out)
        print(f"wrote {fld.m} x {fld.n} weight field to {args.out}")
    return 0


def _emit_result(res, out) -> None:
    payload = {"length": res.length}
    if res.witness is not None:
        payload["witness"] = [list(p) for p in res.witness]
    text = json.dumps(payload, indent=2)
    if out:
        report.write_json(out, payload)
    print(text)


def _cmd_solve(args) -> int:
    if args.what == "continuous":
        cloud = model.read_cloud_csv(args.points)
        region = (
            args.x if args.x is not None else cloud.rect[0],
            args.t if args.t is not None else cloud.rect[1],
        )
        res = gap_lis_continuous(cloud, region, (args.h1, args.h2), witness=args.witness)
    elif args.what == "discrete":
        fld = model.read_bitfield(args.field)
        res = gap_lis_discrete(fld, (args.h1, args.h2), witness=args.witness)
    else:
        fld = model.read_weightfield(args.weights)
        res, _ = lpp_geometric(fld, witness=args.witness)
    _emit_result(res, args.out)
    return 0


def _cmd_lines(args) -> int:
    if (args.points is None) == (args.field is None):
        raise ValueError("give exactly one of --points or --field")
    if args.points is not None:
        cloud = model.read_cloud_csv(args.points)
        ls = build_lines_continuous(cloud, (args.h1, args.h2))
        src = cloud
    else:
        fld = model.read_bitfield(args.field)
        ls = build_lines_discrete(fld, (args.h1, args.h2))
        src = None
    payload = [{"corners": [[x, y] for x, y in line.corners()]} for line in ls.lines]
    report.write_json(args.out, {"lines": payload})
    print(f"wrote {len(ls.lines)} lines to {args.out}")
    if args.figure:
        report.render_lines_figure(ls, args.figure, cloud=src)
        print(f"wrote figure {args.figure}")
    return 0


def _cmd_couple(args, threads) -> int:
    if args.what == "verify":
        params = {}
        if args.identity == "cont-gap-vs-plain":
            if args.x is None or args.t is None:
                raise ValueError("cont-gap-vs-plain needs --x and --t")
            params = {"x": args.x, "t": args.t, "h": (args.h1, args.h2)}
        else:
            if args.m is None or args.n is None or args.p is None:
                raise ValueError(f"{args.identity} needs --m, --n and --p")
            params = {"m": args.m, "n": args.n, "p": args.p, "h": (args.h1, args.h2)}
        rep = couplings.check_distributional_identity(
            args.identity,
            params,
            range(args.kmax + 1),
            args.n_replicas,
            args.seed,
            workers=threads,
        )
        if args.out:
            report.write_csv(args.out, report.CDF_FIELDS, rep["rows"])
        status = "PASS" if rep["passed"] else "FAIL"
        print(
            f"{status} {args.identity}: max CDF gap {rep['max_gap']:.5f} vs band {rep['band']:.5f}"
        )
        return 0 if rep["passed"] else 1
    if args.what == "dilate-cont":
        cloud = model.read_cloud_csv(args.points)
        pair = couplings.dilate_continuous(
            cloud, (args.h1, args.h2), SeedSpec(args.aux_seed, args.aux_stream)
        )
        model.write_cloud_csv(pair.transformed, args.out)
    elif args.what == "dilate-disc":
        fld = model.read_bitfield(args.field)
        pair = couplings.dilate_discrete(
            fld, (args.h1, args.h2), args.p, SeedSpec(args.aux_seed, args.aux_stream)
        )
        model.write_bitfield(pair.transformed, args.out)
    elif args.what == "psi":
        fld = model.read_bitfield(args.field)
        pair = couplings.project_psi(fld, args.h)
        model.write_bitfield(pair.transformed, args.out)
    else:
        fld = model.read_bitfield(args.field)
        pair = couplings.clump_to_geometric(fld)
        model.write_weightfield(pair.transformed, args.out)
    bad = couplings.check_pathwise(pair)
    print(f"wrote {args.out}; pathwise identity violations: {bad}")
    return 0 if bad == 0 else 1


def _cmd_limit(args) -> int:
    if args.what == "f":
        print(f"{f_limit(args.a, args.b):.10f}")
    elif args.what == "fh":
        print(f"{f_gap_limit(args.a, args.b, (args.h1, args.h2)):.10f}")
    elif args.what == "sigma-cont":
        fs = sigma_gap_continuous(args.a, args.b, (args.h1, args.h2))
        print(f"center={fs.center:.10f} scale={fs.scale:.10f} exponent=1/3")
    elif args.what == "g":
        print(f"{g_limit(args.a, args.b, args.p):.10f}")
    elif args.what == "gh":
        res = g_gap_limit(args.a, args.b, (args.h1, args.h2), args.p)
        print(f"{res.value:.10f} branch={res.branch} residual={res.residual:.3e}")
    elif args.what == "alphabeta":
        ab = solve_alpha_beta(args.a, args.b, (args.h1, args.h2), args.p)
        print(f"alpha={ab.alpha:.10f} beta={ab.beta:.10f} residual={ab.residual:.3e}")
    elif args.what == "sigma-disc":
        fs = sigma_gap_discrete(args.a, args.b, (args.h1, args.h2), args.p)
        print(f"center={fs.center:.10f} scale={fs.scale:.10f} exponent=1/3")
    elif args.what == "sandwich":
        table = TracyWidomTable.from_csv(args.tw_table)
        lo, hi = report_sandwich(args.a, args.b, (args.h1, args.h2), args.p, args.x, table)
        print(f"lower={lo:.10f} upper={hi:.10f}")
    else:
        c = math.inf if args.c in ("inf", "+inf") else float(args.c)
        tag, val = regime_limit(c, args.a, args.b)
        print(f"normalization={tag} value={val:.10f}")
    return 0


def _cmd_oracle(args) -> int:
    p = Fraction(args.p)
    verify = oracle.verify_gap_vs_lpp if args.identity == "gap-vs-lpp" else oracle.verify_gap_vs_unit
    rep = verify(args.m, args.n, (args.h1, args.h2), p, range(args.kmax + 1))
    payload = {
        "identity": args.identity,
        "rows": rep["rows"],
        "all_equal": rep["all_equal"],
        "max_abs_discrepancy": rep["max_abs_discrepancy"],
    }
    if args.out:
        report.write_json(args.out, payload)
    for row in rep["rows"]:
        print(f"k={row['k']}: lhs={row['lhs']} rhs={row['rhs']} equal={row['equal']}")
    print("PASS" if rep["all_equal"] else "FAIL")
    return 0 if rep["all_equal"] else 1


def _cmd_mc(args, threads) -> int:
    with open(args.spec) as fh:
        spec = mc.ExperimentSpec.from_json(fh.read())
    rep = mc.run_experiment(spec, workers=threads)
    table = None
    if spec.params.get("tw_table"):
        table = TracyWidomTable.from_csv(spec.params["tw_table"])
    paths = report.emit_report(rep, args.out, figures=not args.no_figures, table=table)
    for pth in paths:
        print(f"wrote {pth}")
    if rep.passed is None:
        return 0
    print("PASS" if rep.passed else "FAIL")
    return 0 if rep.passed else 1


def main(argv=None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    threads = getattr(args, "threads", None)
    if threads is None:
        threads = default_workers()
    try:
        if args.cmd == "sample":
            return _cmd_sample(args)
        if args.cmd == "solve":
            return _cmd_solve(args)
        if args.cmd == "lines":
            return _cmd_lines(args)
        if args.cmd == "couple":
            return _cmd_couple(args, threads)
        if args.cmd == "limit":
            return _cmd_limit(args)
        if args.cmd == "oracle":
            return _cmd_oracle(args)
        if args.cmd == "mc":
            return _cmd_mc(args, threads)
        raise ValueError(f"unknown command {args.cmd!r}")
    except FileNotFoundError as exc:
        print(f"error: missing file: {exc.filename or exc}", file=sys.stderr)
        return USAGE_ERROR
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
