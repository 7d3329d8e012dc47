"""Command-line entry point.

Subcommands: profile, bound, simulate, oracle, sweep, cluster.  Machine
readable output is written atomically (temp file + rename); a short human
summary goes to stdout.  All randomness flows from an explicit seed; there is
no wall-clock fallback.  Exit codes: 0 success, 2 usage, 3 validation,
4 size guard, 5 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

import numpy as np

from . import __version__, bounds, experiments, moment_oracle, profiles, samplers
from .errors import ContractError, NumericalError, ParameterError, SizeGuardError

_SALT_FAMILY = 4 << 32

VERSION_TABLE = f"""hetwishart {__version__}
constants:
  C1(eps1)       = 10 (1+eps1) sqrt(ceil(1/log(1+eps1)))
  C2(eps1,eps2)  = (1+eps1) ceil(1/log(1+eps1)) (25/eps2 + 24)
  envelope C     = {moment_oracle.ENVELOPE_CONSTANT}  (sub-Gaussian moment envelope (C kappa)^(alpha+2 beta))
  s_b^2          = 2^(b-1) Gamma(b-1/2) / Gamma(1/2)  (heavy-tail variance normalizer)
guards:
  gaussian_moment order <= {moment_oracle.MAX_GAUSSIAN_ORDER}; heavy-tail order <= {moment_oracle.MAX_HEAVY_TAIL_ORDER}
  cycle enumeration <= {moment_oracle.ENUMERATION_GUARD} cycles"""


def _atomic_write(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _emit(args, payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if getattr(args, "out", None):
        _atomic_write(args.out, text + "\n")
    print(text)


def _load_model(spec: str | None) -> samplers.NoiseModel:
    if spec is None:
        return samplers.Gaussian()
    if spec.strip().startswith("{"):
        return samplers.model_from_json_dict(json.loads(spec))
    with open(spec, "r", encoding="utf-8") as fh:
        return samplers.model_from_json_dict(json.load(fh))


def _load_config(args) -> dict:
    cfg = {}
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
        if not isinstance(cfg, dict):
            raise ParameterError("config file must contain a JSON object")
    return cfg


def _require_seed(args, cfg: dict) -> int:
    if args.seed is not None:
        return args.seed
    if "seed" in cfg:
        return int(cfg["seed"])
    raise ParameterError("a --seed is required; runs are never wall-clock seeded")


# ---------------------------------------------------------------- profile


def cmd_profile(args) -> int:
    prof = profiles.load_profile(args.infile)
    s = profiles.summarize(prof)
    if args.out:
        _atomic_write(args.out, profiles.profile_to_json(prof) + "\n")
    payload = {
        "p1": prof.p1,
        "p2": prof.p2,
        "sigma_C": s.sigma_C,
        "sigma_R": s.sigma_R,
        "sigma_star": s.sigma_star,
        "p_min": s.p_min,
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


# ---------------------------------------------------------------- bound


def cmd_bound(args) -> int:
    prof = profiles.load_profile(args.profile)
    s = profiles.summarize(prof)
    if args.id == "gaussian":
        report = bounds.gaussian_upper_bound(s, args.eps1, args.eps2).to_json_dict()
    elif args.id == "symmetrization":
        report = bounds.baseline_bounds(s, prof.p2)[0].to_json_dict()
    elif args.id == "matrix_sum":
        report = bounds.baseline_bounds(s, prof.p2)[1].to_json_dict()
    elif args.id == "lower_bound":
        report = bounds.lower_bound_rate(s, prof.p1, prof.p2).to_json_dict()
    elif args.id in ("structured_rows", "structured_columns"):
        value = experiments.evaluate_bound(args.id, prof)
        report = {"bound_id": args.id, "value": value, "terms": {}, "params": {}, "rate_only": True}
    elif args.id.startswith("unified_"):
        report = bounds.unified_bound(
            s,
            args.id[len("unified_"):],
            alpha=args.alpha,
            B=args.B,
            p_max=max(prof.p1, prof.p2),
            c0=args.c0,
        ).to_json_dict()
    elif args.id == "moment_tail":
        report = bounds.moment_and_tail(s, args.b, args.x, args.C).to_json_dict()
        report["bound_id"] = "moment_tail"
    else:
        raise ParameterError(f"unknown bound id {args.id!r}")
    _emit(args, report)
    return 0


# ---------------------------------------------------------------- simulate


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    seed = _require_seed(args, cfg)
    threads = args.threads if args.threads is not None else int(cfg.get("threads", 1))
    reps = args.reps if args.reps is not None else cfg.get("reps")
    if reps is None:
        raise ParameterError("--reps is required")
    if args.profile:
        prof = profiles.load_profile(args.profile)
    elif "profile" in cfg:
        prof = profiles.profile_from_json(json.dumps(cfg["profile"]))
    else:
        raise ParameterError("--profile (or a config with one) is required")
    model = _load_model(args.model) if args.model else samplers.model_from_json_dict(
        cfg.get("model", {"model": "gaussian", "params": {}})
    )
    est = experiments.estimate_concentration(prof, model, int(reps), seed, threads)
    resolved = {
        "profile": json.loads(profiles.profile_to_json(prof)),
        "model": samplers.model_to_json_dict(model),
        "reps": int(reps),
        "seed": seed,
        "threads": threads,
    }
    _emit(args, {"command": "simulate", "config": resolved, "estimate": est.to_json_dict()})
    return 0


# ---------------------------------------------------------------- oracle


def cmd_oracle(args) -> int:
    if args.check == "paired":
        if args.xs is None:
            raise ParameterError("--xs x1,x2,x3,x4,x5 is required for the paired check")
        xs = [int(v) for v in args.xs.split(",")]
        if len(xs) != 5:
            raise ParameterError("--xs must list exactly five integers")
        res = moment_oracle.check_paired_moment(*xs)
        payload = {"check": "paired", "lhs": res.lhs, "rhs": res.rhs, "holds": res.holds,
                   "cycles_enumerated": res.cycles_enumerated}
        _emit(args, payload)
        return 0

    prof = profiles.load_profile(args.profile)
    q = args.q
    if args.check == "comparison":
        res = moment_oracle.check_gaussian_comparison(prof, q)
    elif args.check == "contraction":
        res = moment_oracle.check_variance_contraction(prof, q)
    elif args.check == "deletion":
        res = moment_oracle.check_diagonal_deletion(prof, q)
    elif args.check in ("trace", "deleted_trace", "shape_trace"):
        fn = {
            "trace": moment_oracle.exact_trace_moment,
            "deleted_trace": moment_oracle.exact_deleted_diagonal_trace_moment,
            "shape_trace": moment_oracle.exact_trace_moment_by_shape,
        }[args.check]
        value = fn(prof, q)
        payload = {"check": args.check, "value": value,
                   "cycles_enumerated": moment_oracle.cycle_count(prof.p1, prof.p2, q)}
        _emit(args, payload)
        return 0
    else:
        raise ParameterError(f"unknown oracle check {args.check!r}")
    payload = {"check": args.check, "lhs": res.lhs, "rhs": res.rhs, "holds": res.holds,
               "cycles_enumerated": res.cycles_enumerated}
    _emit(args, payload)
    return 0 if res.holds else 5


# ---------------------------------------------------------------- sweep


def _resolve_family(family: dict, master_seed: int) -> list[tuple[str, profiles.VarianceProfile]]:
    kind = family.get("kind")
    out: list[tuple[str, profiles.VarianceProfile]] = []
    if kind == "list":
        for entry in family["profiles"]:
            prof = profiles.profile_from_json(json.dumps(entry["profile"]))
            out.append((str(entry.get("name", f"profile{len(out)}")), prof))
        return out
    if kind == "random_uniform":
        count = int(family["count"])
        p1_lo, p1_hi = int(family.get("p1_min", 2)), int(family["p1_max"])
        p2_lo, p2_hi = int(family.get("p2_min", 2)), int(family["p2_max"])
        lo, hi = float(family.get("sigma_min", 0.0)), float(family.get("sigma_max", 1.0))
        for k in range(count):
            rng = samplers.generator(
                samplers.SampleSeed(samplers.derive_seed(master_seed, _SALT_FAMILY), k)
            )
            p1 = int(rng.integers(p1_lo, p1_hi + 1))
            p2 = int(rng.integers(p2_lo, p2_hi + 1))
            sigma = rng.uniform(lo, hi, size=(p1, p2))
            out.append((f"random{k}", profiles.VarianceProfile(sigma)))
        return out
    if kind in ("homoskedastic_rows_grid", "homoskedastic_columns_grid"):
        rows = kind == "homoskedastic_rows_grid"
        grid = [int(v) for v in (family["p1_grid"] if rows else family["p2_grid"])]
        other = int(family["p2"] if rows else family["p1"])
        lo, hi = float(family.get("sigma_min", 0.5)), float(family.get("sigma_max", 1.5))
        for k, dim in enumerate(grid):
            rng = samplers.generator(
                samplers.SampleSeed(samplers.derive_seed(master_seed, _SALT_FAMILY), k)
            )
            sig = rng.uniform(lo, hi, size=dim)
            prof = (
                profiles.homoskedastic_rows(sig, other)
                if rows
                else profiles.homoskedastic_columns(sig, other)
            )
            out.append((f"{'rows' if rows else 'columns'}{dim}", prof))
        return out
    raise ParameterError(f"unknown profile family kind {kind!r}")


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    if not cfg:
        raise ParameterError("--config is required for sweep")
    seed = _require_seed(args, cfg)
    threads = args.threads if args.threads is not None else int(cfg.get("threads", 1))
    named = _resolve_family(cfg["family"], seed)
    model = samplers.model_from_json_dict(cfg.get("model", {"model": "gaussian", "params": {}}))
    bound_cfg = dict(cfg.get("bound", {"id": "gaussian"}))
    bound_id = bound_cfg.pop("id")
    rows = experiments.rate_sweep(
        named, model, int(cfg["reps"]), bound_id, seed, threads, bound_params=bound_cfg
    )
    csv_text = experiments.sweep_rows_to_csv(rows)
    _atomic_write(args.out, csv_text)
    resolved = dict(cfg)
    resolved["seed"] = seed
    resolved["threads"] = threads
    summary = {
        "command": "sweep",
        "config": resolved,
        "rows": len(rows),
        "csv_path": args.out,
        "csv_sha256": hashlib.sha256(csv_text.encode()).hexdigest(),
        "max_ratio": max((r.ratio for r in rows), default=float("nan")),
        "min_ratio": min((r.ratio for r in rows), default=float("nan")),
    }
    if args.summary:
        _atomic_write(args.summary, json.dumps(summary, indent=2, sort_keys=True) + "\n")
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


# ---------------------------------------------------------------- cluster


def cmd_cluster(args) -> int:
    cfg = _load_config(args)
    seed = _require_seed(args, cfg)
    threads = args.threads if args.threads is not None else int(cfg.get("threads", 1))
    n = args.n if args.n is not None else int(cfg["n"])
    p = args.p if args.p is not None else int(cfg["p"])
    reps = args.reps if args.reps is not None else int(cfg["reps"])
    if args.lambdas is not None:
        lambda_grid = [float(v) for v in args.lambdas.split(",")]
    else:
        lambda_grid = [float(v) for v in cfg["lambdas"]]
    if args.sigma_const is not None:
        sigmas = np.full(p, args.sigma_const)
    elif "sigmas" in cfg:
        sigmas = np.asarray(cfg["sigmas"], dtype=float)
    else:
        sigmas = np.ones(p)
    rows, threshold = experiments.phase_diagram(n, p, sigmas, lambda_grid, reps, seed, threads=threads)
    csv_text = experiments.phase_rows_to_csv(rows, threshold)
    if args.out:
        _atomic_write(args.out, csv_text)
    resolved = {
        "n": n,
        "p": p,
        "reps": reps,
        "lambdas": lambda_grid,
        "sigmas": [float(s) for s in sigmas],
        "seed": seed,
        "threads": threads,
    }
    summary = {
        "command": "cluster",
        "config": resolved,
        "snr_threshold": threshold,
        "rows": [
            {"lambda": r.lam, "mean_misclassification": r.mean_misclassification,
             "std_err": r.std_err}
            for r in rows
        ],
    }
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hetwishart", description=__doc__)
    parser.add_argument("--version", action="version", version=VERSION_TABLE)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", help="summarize a variance profile file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", help="write the resolved explicit profile here")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("bound", help="evaluate a closed-form bound on a profile")
    p.add_argument("--profile", required=True)
    p.add_argument("--id", required=True)
    p.add_argument("--eps1", type=float, default=0.1)
    p.add_argument("--eps2", type=float, default=0.1)
    p.add_argument("--b", type=float, default=2.0)
    p.add_argument("--x", type=float, default=1.0)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--alpha", type=float)
    p.add_argument("--B", type=float)
    p.add_argument("--c0", type=float, default=1.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("simulate", help="Monte Carlo estimate of E||ZZ' - E ZZ'||")
    p.add_argument("--profile")
    p.add_argument("--model", help="noise model JSON file or inline JSON")
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--config")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("oracle", help="exact trace-moment computations and checks")
    p.add_argument("--check", required=True,
                   choices=["comparison", "contraction", "deletion", "paired",
                            "trace", "deleted_trace", "shape_trace"])
    p.add_argument("--profile")
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--xs", help="x1,x2,x3,x4,x5 for the paired check")
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("sweep", help="Monte Carlo vs bound over a profile family")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--summary", help="also write the JSON summary here")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("cluster", help="two-component clustering phase diagram")
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--reps", type=int)
    p.add_argument("--lambdas", help="comma-separated signal strengths")
    p.add_argument("--sigma-const", type=float, dest="sigma_const")
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--config")
    p.add_argument("--out")
    p.set_defaults(func=cmd_cluster)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParameterError, ContractError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except SizeGuardError as exc:
        print(f"size guard: {exc}", file=sys.stderr)
        return 4
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 5


if __name__ == "__main__":
    sys.exit(main())
