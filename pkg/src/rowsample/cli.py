"""Command-line entry point: ``rowsample {bounds,generate,precondition-demo,sweep,tables}``."""
from __future__ import annotations

import argparse
import csv
import math
import sys
from typing import Optional, Sequence

import numpy as np

from . import bounds, generators, harness, matrix_io
from .linalg import LeverageProfile, thin_qr
from .precondition import (RankDeficientSample, preconditioned_kappa_pair, lsqr_solve, next_pow2,
                           random_sign_hadamard, random_signs)
from .sampling import RngStream, Strategy, apply_selection, sample

EXIT_INFEASIBLE = 2


def _read_profile(path) -> np.ndarray:
    text = open(path).read().replace(",", " ").split()
    return np.array([float(t) for t in text])


def _resolve_mu(args, m: int, n: int) -> float:
    if args.mu is not None:
        return args.mu
    return args.mu_factor * n / m


def cmd_bounds(args) -> int:
    """Bound summary for one (m, n, mu[, tau]) as a two-line CSV on stdout."""
    if args.profile_file:
        prof = LeverageProfile.from_scores(_read_profile(args.profile_file))
        m, n, mu = prof.m, prof.n_implied, prof.coherence
        tau = bounds.tau_bound(prof) if args.tau is None else args.tau
    else:
        if args.m is None or args.n is None:
            raise SystemExit("bounds: give --m and --n, or --profile-file")
        m, n = args.m, args.n
        mu = _resolve_mu(args, m, n)
        tau = mu if args.tau is None else args.tau
    eps = bounds.epsilon_for_kappa(args.kappa_target) if args.eps is None else args.eps
    row = {
        "m": m, "n": n, "mu": repr(mu), "tau": repr(tau), "delta": args.delta, "eps": repr(eps),
        "kappa_bound": repr(bounds.kappa_bound(eps)),
        "chernoff_c": bounds.chernoff_min_samples(m, mu, n, args.delta, eps),
        "bernstein_c": bounds.bernstein_min_samples(m, n, mu, tau, args.delta, eps),
        "chernoff_onset": bounds.chernoff_onset(m, mu, n, args.delta),
    }
    row["informative"] = int(bounds.is_informative(row["chernoff_c"], m))
    if args.c is not None:
        ce = bounds.chernoff_epsilon(args.c, m, mu, n, args.delta)
        row["c"] = args.c
        row["chernoff_eps_at_c"] = "" if ce is None else repr(ce)
        row["chernoff_delta_at_c"] = repr(bounds.chernoff_delta(args.c, m, mu, n, eps)) if args.c >= n else ""
        row["bernstein_eps_at_c"] = repr(bounds.bernstein_epsilon(args.c, m, n, mu, tau, args.delta))
    w = csv.DictWriter(sys.stdout, fieldnames=list(row), lineterminator="\n")
    w.writeheader()
    w.writerow({k: ("" if v is None else v) for k, v in row.items()})
    return 0


def cmd_generate(args) -> int:
    try:
        if args.family == "givens":
            if args.profile == "file":
                if not args.profile_file:
                    raise ValueError("--profile file needs --profile-file")
                prof = LeverageProfile.from_scores(_read_profile(args.profile_file))
            else:
                mu = _resolve_mu(args, args.m, args.n)
                build = (generators.leverage_one_spike if args.profile == "spike"
                         else generators.leverage_many_zeros)
                prof = build(args.m, args.n, mu)
            mix = RngStream(args.seed) if args.seed is not None else None
            q = generators.generate_with_leverage(prof, mix=mix)
        elif args.family == "stacked":
            q = generators.stacked_diagonal(args.m, args.n, _resolve_mu(args, args.m, args.n))
        else:
            q = generators.hadamard_structured(args.m, args.n, _resolve_mu(args, args.m, args.n))
    except ValueError as exc:
        print("generate: %s" % exc, file=sys.stderr)
        return EXIT_INFEASIBLE
    text = matrix_io.dumps(q.q)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    return 0


def cmd_precondition_demo(args) -> int:
    """Random ill-conditioned A; per trial: kappa both ways and LSQR iterations."""
    root = RngStream(args.seed)
    gen = root.child(0).generator()
    u, _ = np.linalg.qr(gen.standard_normal((args.m, args.n)))
    v, _ = np.linalg.qr(gen.standard_normal((args.n, args.n)))
    a = (u * np.logspace(0, math.log10(args.cond), args.n)) @ v.T
    b = gen.standard_normal(args.m)
    plain = lsqr_solve(a, b)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(("trial", "rank_ok", "kappa_precond", "kappa_sq", "lsqr_iters_precond", "lsqr_iters_plain"))
    for t in range(args.trials):
        g = root.child(t + 1).generator()
        rows = next_pow2(args.m)
        signs = random_signs(rows, g)
        sel = sample(args.strategy, rows, args.c, g)
        try:
            k_pre, k_sq = preconditioned_kappa_pair(a, sel, g, signs=signs)
        except RankDeficientSample:
            w.writerow((t, 0, "", "", "", plain.iterations))
            continue
        fa = random_sign_hadamard(a, g, pad=True, signs=signs)
        _, r_s = thin_qr(apply_selection(sel, fa))
        pre = lsqr_solve(a, b, r_s)
        w.writerow((t, 1, "%.10g" % k_pre, "%.10g" % k_sq, pre.iterations, plain.iterations))
    return 0


def cmd_sweep(args) -> int:
    try:
        data = harness.read_config_mapping(args.config) if args.config else {}
        overrides = {k: getattr(args, k) for k in ("m", "n", "family", "mu", "mu_factor", "trials",
                                                     "seed", "rank_tol", "workers", "delta")
                     if getattr(args, k) is not None}
        if args.full_scale:
            overrides.setdefault("m", 10_000)
        if args.strategies:
            overrides["strategies"] = args.strategies
        if "m" in overrides or "n" in overrides:
            data.pop("c_grid", None)
        if "mu_factor" in overrides:
            data.pop("mu", None)
        data.update(overrides)
        cfg = harness.ExperimentConfig.from_mapping(data)
        basis = harness.build_basis(cfg)
    except harness.ConfigError as exc:
        print("sweep: %s" % exc, file=sys.stderr)
        return EXIT_INFEASIBLE
    records = harness.run_sweep(cfg, basis)
    paths = harness.write_outputs(cfg, records, args.out_dir)
    for p in paths.values():
        print(p)
    return 0


def cmd_tables(args) -> int:
    tables = harness.make_tables(args.out_dir, args.m, args.n, args.delta)
    for name in tables:
        print("%s/%s.csv" % (args.out_dir, name))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rowsample", description="Uniform row sampling of orthonormal matrices.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bounds", help="sample-count and condition-number bounds")
    b.add_argument("--m", type=int)
    b.add_argument("--n", type=int)
    grp = b.add_mutually_exclusive_group()
    grp.add_argument("--mu", type=float)
    grp.add_argument("--mu-factor", type=float, default=1.0, help="mu as a multiple of n/m")
    grp.add_argument("--profile-file", help="whitespace/comma separated leverage scores")
    b.add_argument("--tau", type=float, help="default: mu, or computed from --profile-file")
    b.add_argument("--delta", type=float, default=0.01)
    eg = b.add_mutually_exclusive_group()
    eg.add_argument("--eps", type=float)
    eg.add_argument("--kappa-target", type=float, default=10.0)
    b.add_argument("--c", type=int, help="also evaluate eps and delta at this c")
    b.set_defaults(func=cmd_bounds)

    g = sub.add_parser("generate", help="orthonormal matrix with given coherence/leverage")
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    mg = g.add_mutually_exclusive_group()
    mg.add_argument("--mu", type=float)
    mg.add_argument("--mu-factor", type=float, default=1.0)
    g.add_argument("--profile", choices=("spike", "zeros", "file"), default="spike")
    g.add_argument("--profile-file")
    g.add_argument("--family", choices=("givens", "stacked", "hadamard"), default="givens")
    g.add_argument("--seed", type=int, help="right-multiply by a seeded Haar rotation")
    g.add_argument("--out", help="output path (default stdout)")
    g.set_defaults(func=cmd_generate)

    d = sub.add_parser("precondition-demo", help="sampled-QR preconditioner on a random problem")
    d.add_argument("--m", type=int, default=512)
    d.add_argument("--n", type=int, default=6)
    d.add_argument("--c", type=int, default=64)
    d.add_argument("--strategy", choices=[s.value for s in Strategy], default="with")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--trials", type=int, default=5)
    d.add_argument("--cond", type=float, default=1e4, help="condition number of the test matrix")
    d.set_defaults(func=cmd_precondition_demo)

    s = sub.add_parser("sweep", help="condition-number sweep over c with CSV/SVG output")
    s.add_argument("--config", help="TOML file of key = value settings")
    s.add_argument("--out-dir", required=True)
    s.add_argument("--m", type=int)
    s.add_argument("--n", type=int)
    s.add_argument("--family", choices=harness.FAMILIES)
    s.add_argument("--mu", type=float)
    s.add_argument("--mu-factor", type=float)
    s.add_argument("--strategies", nargs="+", choices=[x.value for x in Strategy])
    s.add_argument("--trials", type=int)
    s.add_argument("--delta", type=float)
    s.add_argument("--seed", type=int)
    s.add_argument("--rank-tol", type=float, help="absolute singular value cutoff for rank")
    s.add_argument("--workers", type=int)
    s.add_argument("--full-scale", action="store_true", help="m = 10000 unless --m is given")
    s.set_defaults(func=cmd_sweep)

    t = sub.add_parser("tables", help="write the deterministic sample-count tables")
    t.add_argument("--out-dir", required=True)
    t.add_argument("--m", type=int, default=10_000)
    t.add_argument("--n", type=int, default=5)
    t.add_argument("--delta", type=float, default=0.01)
    t.set_defaults(func=cmd_tables)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print("%s: %s" % (args.command, exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
