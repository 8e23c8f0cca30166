"""Command line entry point: ``aas generate | cluster | sweep | baseline``.

Every command takes one ``--seed``; run ``r`` of a repeated experiment uses
seed ``seed + r``.  A JSON file given with ``--config`` may set any flag
(keys use underscores); flags typed on the command line win over it.
The ``AAS_THREADS`` environment variable caps BLAS threads.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from threadpoolctl import threadpool_limits

from .fusion import ABLATIONS, FusionConfig, build_structures, run, run_report
from .metrics import evaluate, format_table, kmeans_baseline, summarize
from .structural import save_s_tilde_csv
from .synth import PRESETS, SbmSpec, generate, load_dataset, preset, save_dataset

__all__ = ["main", "build_parser"]

DEFAULTS = dict(
    alpha=0.1, theta=0.3, k=4, seed=0, repeat=1, ablation="full", t_max=30,
    outer_max=50, outer_tol=1e-5, restarts=10, fresh_data=False,
    alphas=None, thetas=None,
)


class UsageError(Exception):
    pass


def _floats(text):
    return [float(t) for t in text.split(",") if t.strip()]


def _add_source(p):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--dataset", help="dataset directory (manifest.json layout)")
    src.add_argument("--preset", choices=sorted(PRESETS), help="synthetic preset")
    p.add_argument("--fresh-data", action="store_true", default=None,
                   help="with --preset, draw a new replica for every run seed")
    p.add_argument("--config", help="JSON file with default values for any flag")
    p.add_argument("--seed", type=int)
    p.add_argument("--repeat", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--out", required=True, help="output directory")


def _add_fusion(p):
    p.add_argument("--alpha", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--ablation", choices=ABLATIONS)
    p.add_argument("--t-max", type=int)
    p.add_argument("--outer-max", type=int)
    p.add_argument("--outer-tol", type=float)


def build_parser():
    parser = argparse.ArgumentParser(prog="aas", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic multi-view dataset")
    src = g.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=sorted(PRESETS))
    src.add_argument("--spec", help="JSON file with SbmSpec fields")
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--out", required=True)

    c = sub.add_parser("cluster", help="run the clustering repeatedly and report")
    _add_source(c)
    _add_fusion(c)

    s = sub.add_parser("sweep", help="grid over alpha and theta")
    _add_source(s)
    _add_fusion(s)
    s.add_argument("--alphas", type=_floats, help="comma separated, e.g. 0.001,0.1,10")
    s.add_argument("--thetas", type=_floats, help="comma separated, e.g. 0.1,0.3,0.5")

    b = sub.add_parser("baseline", help="best single-view K-means")
    _add_source(b)
    b.add_argument("--restarts", type=int)
    return parser


def _resolve(args):
    """Merge defaults, the optional config file and explicit flags."""
    opts = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        loaded = {k.replace("-", "_"): v for k, v in loaded.items()}
        unknown = set(loaded) - set(DEFAULTS) - {"dataset", "preset", "out"}
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        opts.update(loaded)
    opts.update({k: v for k, v in vars(args).items() if v is not None})
    if not opts.get("dataset") and not opts.get("preset"):
        raise UsageError("need --dataset or --preset")
    if opts["repeat"] < 1:
        raise UsageError("--repeat must be at least 1")
    if opts["fresh_data"] and not opts.get("preset"):
        raise UsageError("--fresh-data needs --preset")
    return opts


def _dataset_for(opts, seed):
    if opts.get("dataset"):
        return load_dataset(opts["dataset"])
    return generate(preset(opts["preset"], seed))


def _datasets(opts):
    """``(seed, dataset)`` per run; one shared dataset unless ``fresh_data``."""
    seeds = [opts["seed"] + r for r in range(opts["repeat"])]
    if opts["fresh_data"]:
        return [(s, _dataset_for(opts, s)) for s in seeds]
    shared = _dataset_for(opts, opts["seed"])
    return [(s, shared) for s in seeds]


def _fusion_config(opts, seed, **override):
    keys = ("alpha", "theta", "k", "t_max", "outer_max", "outer_tol", "ablation")
    kw = {k: opts[k] for k in keys}
    kw.update(override)
    return FusionConfig(seed=seed, **kw)


def _write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True))


def _run_once(ds, config):
    structures = build_structures(ds, config)
    state = run(ds, config, structures=structures)
    ev = None if ds.labels is None else evaluate(state.labels, ds.labels, seed=config.seed)
    return state, structures, ev


def _repeat(opts, out, tag="", **override):
    """Run every seed; returns ``(evaluations, failures)``."""
    evals, failures = [], []
    for r, (seed, ds) in enumerate(_datasets(opts)):
        try:
            config = _fusion_config(opts, seed, **override)
            state, structures, ev = _run_once(ds, config)
        except Exception as exc:  # a failed run must not hide the others
            failures.append({"run": r, "seed": seed, "error": f"{type(exc).__name__}: {exc}"})
            print(f"run {r} (seed {seed}) failed: {exc}", file=sys.stderr)
            continue
        if ev is not None:
            evals.append(ev)
        if out is None:
            continue
        rep = run_report(state, config, ev)
        rep["run"] = r
        _write_json(out / f"run{tag}_{r:03d}.json", rep)
        with open(out / f"trace{tag}_{r:03d}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["outer_iteration", "objective", "qp_objective"])
            for i, (obj, qp) in enumerate(zip(state.objective_trace, state.qp_trace)):
                w.writerow([i + 1, repr(obj), repr(qp)])
        for i, st in enumerate(structures):
            save_s_tilde_csv(st, out / f"s_tilde{tag}_{r:03d}_view{i}.csv")
    return evals, failures


def _source_name(opts):
    return opts.get("preset") or Path(opts["dataset"]).name


def cmd_generate(args):
    if args.preset:
        spec = preset(args.preset, 0 if args.seed is None else args.seed)
    else:
        try:
            spec = SbmSpec.from_dict(json.loads(Path(args.spec).read_text()))
        except (OSError, json.JSONDecodeError, TypeError, ValueError) as exc:
            raise UsageError(f"invalid spec {args.spec}: {exc}") from None
        if args.seed is not None:
            spec.seed = args.seed
    path = save_dataset(generate(spec), args.out)
    print(f"wrote n={spec.n}, v={spec.v} to {path}")
    return 0


def cmd_cluster(args):
    opts = _resolve(args)
    out = Path(opts["out"])
    out.mkdir(parents=True, exist_ok=True)
    evals, failures = _repeat(opts, out)
    summary = {"options": opts, "runs": opts["repeat"], "failures": failures}
    if evals:
        summary["metrics"] = summarize(evals)
        table = format_table([(_source_name(opts), f"AAS[{opts['ablation']}]",
                               summary["metrics"])])
        (out / "summary.md").write_text(table + "\n")
        print(table)
    _write_json(out / "summary.json", summary)
    return 1 if failures else 0


def cmd_sweep(args):
    opts = _resolve(args)
    alphas = opts["alphas"] or []
    thetas = opts["thetas"] or []
    if not alphas or not thetas:
        raise UsageError("sweep needs non-empty --alphas and --thetas")
    out = Path(opts["out"])
    out.mkdir(parents=True, exist_ok=True)
    rows, failures = [], []
    for alpha in alphas:
        for theta in thetas:
            evals, fails = _repeat(opts, None, alpha=alpha, theta=theta)
            failures.extend(dict(f, alpha=alpha, theta=theta) for f in fails)
            if not evals:
                continue
            s = summarize(evals)
            rows.append([alpha, theta] + [s[key][0] for key in ("acc", "nmi", "purity")])
    with open(out / "sweep.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["alpha", "theta", "acc", "nmi", "purity"])
        w.writerows(rows)
    _write_json(out / "sweep.json", {"options": opts, "failures": failures})
    for r in rows:
        print("alpha={:<8g} theta={:<5g} acc={:.3f} nmi={:.3f} purity={:.3f}".format(*r))
    return 1 if failures else 0


def cmd_baseline(args):
    opts = _resolve(args)
    out = Path(opts["out"])
    out.mkdir(parents=True, exist_ok=True)
    reports, failures = [], []
    for r, (seed, ds) in enumerate(_datasets(opts)):
        try:
            reports.append(kmeans_baseline(ds, opts["k"], restarts=opts["restarts"], seed=seed))
        except Exception as exc:
            failures.append({"run": r, "seed": seed, "error": f"{type(exc).__name__}: {exc}"})
            print(f"run {r} (seed {seed}) failed: {exc}", file=sys.stderr)
    result = {"options": opts, "runs": [rep.to_dict() for rep in reports], "failures": failures}
    if reports:
        result["metrics"] = summarize(reports)
        table = format_table([(_source_name(opts), "K-means", result["metrics"])])
        (out / "baseline.md").write_text(table + "\n")
        print(table)
    _write_json(out / "baseline.json", result)
    return 1 if failures else 0


COMMANDS = {"generate": cmd_generate, "cluster": cmd_cluster,
            "sweep": cmd_sweep, "baseline": cmd_baseline}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    threads = os.environ.get("AAS_THREADS")
    try:
        limit = int(threads) if threads else None
    except ValueError:
        parser.error(f"AAS_THREADS must be an integer, got {threads!r}")
    try:
        with threadpool_limits(limits=limit):
            return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"aas {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"aas {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
