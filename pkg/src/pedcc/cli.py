"""``pedcc`` command line.

Exit codes: 0 ok, 1 diagnostic check failed, 2 usage or unreadable input,
3 runtime failure.
"""
import argparse
import contextlib
import json
import math
import sys
import warnings

import numpy as np

from pedcc import __version__
from pedcc.bench import format_table, run_bench, speedups
from pedcc.errors import IllConditioned, PedccError
from pedcc.frame import cosine_distance_table, verify_pedcc
from pedcc.generator import (
    ChargeSimConfig,
    generate_basic_recursive,
    generate_iterative_charge,
    generate_pedcc,
)
from pedcc.io import PointFileError, read_point_set, write_point_set
from pedcc.kernels import DEFAULT_BACKEND
from pedcc.linalg import RNG_ALGORITHM
from pedcc.loss import LossParams
from pedcc.toy import TrainConfig, dim_sweep, make_blobs, train

OK, DIAGNOSTIC, USAGE, RUNTIME = 0, 1, 2, 3
VERIFY_TOL = 1e-8


class UsageError(Exception):
    pass


def _int_list(text):
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _num(x):
    """JSON-safe float (NaN/inf become null)."""
    x = float(x)
    return x if math.isfinite(x) else None


def _emit_json(command, params, results):
    params = dict(params, rng=RNG_ALGORITHM)
    print(json.dumps({"command": command, "params": params, "results": results}))


@contextlib.contextmanager
def _usage_on_value_error():
    try:
        yield
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _err(msg):
    print(f"pedcc: {msg}", file=sys.stderr)


# -- generate ---------------------------------------------------------------

def cmd_generate(args):
    k, n = args.k, args.n
    if args.method == "analytic":
        if not 2 <= k <= n + 1:
            raise UsageError(f"analytic generation needs 2 <= k <= n+1, got k={k}, n={n}")
        pedcc = generate_basic_recursive(k, n) if args.no_rotate else generate_pedcc(k, n, args.seed)
    else:
        if k < 2 or n < 2:
            raise UsageError(f"iterative generation needs k >= 2 and n >= 2, got k={k}, n={n}")
        with _usage_on_value_error():
            cfg = ChargeSimConfig(
                step_size=args.step_size,
                damping=args.damping,
                max_iters=args.max_iters,
                stop_displacement=args.stop_displacement,
                seed=args.seed,
            )
        pedcc = generate_iterative_charge(k, n, cfg)
    write_point_set(args.out, pedcc)
    dev = pedcc.max_cosine_deviation() if k <= n + 1 else float("nan")
    if args.json:
        _emit_json(
            "generate",
            {"k": k, "n": n, "seed": args.seed, "method": args.method, "out": args.out},
            {"provenance": pedcc.provenance, "seed_used": pedcc.seed,
             "max_cosine_deviation": _num(dev)},
        )
    else:
        print(f"k={k} n={n} provenance={pedcc.provenance} max_cosine_deviation={dev!r}")
    return OK


# -- verify -----------------------------------------------------------------

def cmd_verify(args):
    pedcc = read_point_set(args.inp)
    try:
        rep = verify_pedcc(pedcc, args.trials, args.seed)
        frame = {
            "frame_sum": rep.frame_sum,
            "predicted": rep.predicted,
            "relative_error": rep.relative_error,
        }
    except IllConditioned:
        frame = {"frame_sum": math.nan, "predicted": math.nan, "relative_error": math.nan}
    results = dict(
        frame,
        max_pairwise_cosine_deviation=pedcc.max_cosine_deviation(),
        centroid_sum_norm=pedcc.centroid_sum_norm(),
    )
    ok = (
        results["max_pairwise_cosine_deviation"] <= VERIFY_TOL
        and results["relative_error"] <= VERIFY_TOL
    )
    results["pass"] = bool(ok)
    if args.json:
        _emit_json(
            "verify",
            {"in": args.inp, "trials": args.trials, "seed": args.seed, "k": pedcc.k, "n": pedcc.n},
            {key: (_num(v) if isinstance(v, float) else v) for key, v in results.items()},
        )
    else:
        print(f"k={pedcc.k} n={pedcc.n} provenance={pedcc.provenance}")
        for key in ("max_pairwise_cosine_deviation", "centroid_sum_norm",
                    "frame_sum", "predicted", "relative_error"):
            print(f"{key}={results[key]!r}")
        print("PASS" if ok else "FAIL")
    return OK if ok else DIAGNOSTIC


# -- distances --------------------------------------------------------------

def format_half_table(table, dp):
    k = table.shape[0]
    cells = [["0"] * k for _ in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            cells[i][j] = f"{table[i, j]:.{dp}f}"
    width = max(len(c) for row in cells for c in row)
    width = max(width, len(str(k - 1)))
    lines = [" " * len(str(k - 1)) + " | " + " ".join(f"{j:>{width}}" for j in range(k))]
    for i, row in enumerate(cells):
        lines.append(f"{i:>{len(str(k - 1))}} | " + " ".join(f"{c:>{width}}" for c in row))
    return "\n".join(lines)


def cmd_distances(args):
    pedcc = read_point_set(args.inp)
    table = cosine_distance_table(pedcc)
    if args.json:
        _emit_json(
            "distances",
            {"in": args.inp, "dp": args.dp},
            {"k": pedcc.k, "table": table.tolist(),
             "rounded": np.round(table, args.dp).tolist()},
        )
    else:
        print(format_half_table(table, args.dp))
    return OK


# -- bench ------------------------------------------------------------------

def cmd_bench(args):
    records = run_bench(args.ks, args.dims, args.seed, args.iters, args.parallel, args.backend)
    sp = speedups(records)
    if args.json:
        results = []
        for rec in records:
            d = rec.as_dict()
            d["max_cosine_deviation"] = _num(d["max_cosine_deviation"])
            d["speedup"] = sp[(rec.k, rec.n)]
            results.append(d)
        _emit_json(
            "bench",
            {"ks": args.ks, "dims": args.dims, "seed": args.seed, "iters": args.iters,
             "backend": args.backend or DEFAULT_BACKEND},
            results,
        )
    else:
        print(format_table(records))
    return OK


# -- train-toy --------------------------------------------------------------

def _report_dict(rep):
    return {
        "feature_dim": rep.feature_dim,
        "final_train_accuracy": rep.final_train_accuracy,
        "final_test_accuracy": rep.final_test_accuracy,
        "mean_subspace_angle_deg": rep.mean_subspace_angle_deg,
        "initial_subspace_angle_deg": rep.angle_curve[0],
        "loss_first": rep.loss_curve[0],
        "loss_last": rep.loss_curve[-1],
        "loss_curve": rep.loss_curve,
        "centroid_method": rep.centroid_method,
    }


def cmd_train_toy(args):
    with _usage_on_value_error():
        dataset = make_blobs(args.k, args.din, args.per_class, args.sigma, args.seed)
        cfg = TrainConfig(
            epochs=args.epochs,
            batch_size=args.batch_size,
            learning_rate=args.lr,
            loss_params=LossParams(),
            feature_dim=args.feature_dim,
            hidden=args.hidden,
            seed=args.seed,
        )
        for d in args.dim_sweep or ():
            if d < 2:
                raise ValueError(f"sweep dims must be >= 2, got {d}")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if args.dim_sweep:
            reports = dim_sweep(dataset, args.dim_sweep, cfg)
        else:
            reports = [train(dataset, cfg)[1]]
    for w in caught:
        _err(f"warning: {w.message}")

    params = {"k": args.k, "din": args.din, "per_class": args.per_class, "sigma": args.sigma,
              "epochs": args.epochs, "seed": args.seed, "lr": args.lr,
              "feature_dims": [r.feature_dim for r in reports]}
    if args.json:
        _emit_json("train-toy", params, [_report_dict(r) for r in reports])
        return OK
    if args.dim_sweep:
        print(f"{'dim':>6} {'train acc':>10} {'test acc':>10} {'angle(deg)':>12}")
        for r in reports:
            print(f"{r.feature_dim:>6} {r.final_train_accuracy:>10.4f} "
                  f"{r.final_test_accuracy:>10.4f} {r.mean_subspace_angle_deg:>12.4f}")
    else:
        d = _report_dict(reports[0])
        for key in ("feature_dim", "final_train_accuracy", "final_test_accuracy",
                    "initial_subspace_angle_deg", "mean_subspace_angle_deg",
                    "loss_first", "loss_last"):
            print(f"{key}={d[key]!r}")
    return OK


# -- parser -----------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="pedcc", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a centroid set and write it to a file")
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--method", choices=("analytic", "iterative"), default="analytic")
    g.add_argument("--out", required=True)
    g.add_argument("--no-rotate", action="store_true",
                   help="analytic only: write the unrotated basic set")
    g.add_argument("--step-size", type=float, default=ChargeSimConfig.step_size)
    g.add_argument("--damping", type=float, default=ChargeSimConfig.damping)
    g.add_argument("--max-iters", type=int, default=ChargeSimConfig.max_iters)
    g.add_argument("--stop-displacement", type=float, default=ChargeSimConfig.stop_displacement)
    g.add_argument("--json", action="store_true")
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("verify", help="check frame properties of a point file")
    v.add_argument("--in", dest="inp", required=True)
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("distances", help="print the pairwise cosine half-table")
    d.add_argument("--in", dest="inp", required=True)
    d.add_argument("--dp", type=int, default=2)
    d.add_argument("--json", action="store_true")
    d.set_defaults(func=cmd_distances)

    b = sub.add_parser("bench", help="time analytic vs charge-model generation")
    b.add_argument("--dims", type=_int_list, required=True)
    b.add_argument("--ks", type=_int_list, required=True)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--iters", type=int, default=10000)
    b.add_argument("--parallel", action="store_true")
    b.add_argument("--backend", choices=("python", "cython"), default=None)
    b.add_argument("--json", action="store_true")
    b.set_defaults(func=cmd_bench)

    t = sub.add_parser("train-toy", help="train the toy classifier on synthetic blobs")
    t.add_argument("--k", type=int, default=3)
    t.add_argument("--din", type=int, default=5)
    t.add_argument("--per-class", type=int, default=100)
    group = t.add_mutually_exclusive_group()
    group.add_argument("--feature-dim", type=int, default=8)
    group.add_argument("--dim-sweep", type=_int_list, default=None)
    t.add_argument("--sigma", type=float, default=0.5)
    t.add_argument("--epochs", type=int, default=200)
    t.add_argument("--seed", type=int, default=3)
    t.add_argument("--lr", type=float, default=0.05)
    t.add_argument("--batch-size", type=int, default=32)
    t.add_argument("--hidden", type=int, default=32)
    t.add_argument("--json", action="store_true")
    t.set_defaults(func=cmd_train_toy)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        _err(str(exc))
        return USAGE
    except (PointFileError, OSError) as exc:
        _err(str(exc))
        return USAGE
    except (PedccError, ValueError) as exc:
        _err(str(exc))
        return RUNTIME


if __name__ == "__main__":
    sys.exit(main())
