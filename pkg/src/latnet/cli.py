"""Command-line front end.

Subcommands: ``describe`` (network statistics), ``fit`` (posterior sampling),
``cv`` (k-fold link-prediction AUC), ``gof`` (WAIC/DIC and posterior
predictive checks), ``compare`` (WAIC model comparison over a K grid).

Options may come from a flat JSON config file (``--config``); command-line
flags win over config values, which win over the built-in defaults (the
defaults reproduce the reference experimental protocol: 60,000 iterations,
10,000 burn-in, no thinning). Exit codes: 0 success, 1 runtime failure,
2 usage/config error. ``LATNET_OUTDIR`` sets the default output directory.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import pathlib
import sys

import numpy as np

from .datasets import DATASET_NAMES, load_dataset
from .evaluation import (EvalReport, ModelSpec, cross_validate, in_sample_auc,
                         in_sample_probs, information_criteria,
                         posterior_predictive)
from .mcmc import McmcConfig, PosteriorSamples, run_chains
from .network import Network, load_edge_list, network_stats


class ConfigError(ValueError):
    pass


_DEFAULTS = {
    "n_iter": 60_000,
    "burn_in": 10_000,
    "thin": 1,
    "n_chains": 2,
    "n_jobs": 1,
    "seed": 0,
    "loglik_dtype": "float64",
    "model": "distance",
    "k": 2,
    "n_folds": 5,
    "models": "distance,class,eigen",
    "k_list": "2,4,8",
    "refit": False,
    "samples_dir": None,
    "rel_cost": 0.5,
}


def _load_network(path_or_name):
    if path_or_name in DATASET_NAMES:
        return load_dataset(path_or_name)
    p = pathlib.Path(path_or_name)
    if not p.exists():
        raise FileNotFoundError(f"input not found: {path_or_name}")
    with open(p) as fh:
        return load_edge_list(fh)


def _merge_options(args):
    """defaults < config file < explicit flags."""
    merged = dict(_DEFAULTS)
    if getattr(args, "config", None):
        p = pathlib.Path(args.config)
        if not p.exists():
            raise FileNotFoundError(f"config not found: {args.config}")
        try:
            loaded = json.loads(p.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed config JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config must be a flat JSON object")
        merged.update(loaded)
    for key, val in vars(args).items():
        if key in ("func", "config") or val is None:
            continue
        merged[key] = val
    return merged


def _mcmc_config(opt):
    try:
        return McmcConfig(n_iter=int(opt["n_iter"]), burn_in=int(opt["burn_in"]),
                          thin=int(opt["thin"]), n_chains=int(opt["n_chains"]),
                          seed=int(opt["seed"]), n_jobs=int(opt["n_jobs"]),
                          loglik_dtype=str(opt["loglik_dtype"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _model_spec(opt):
    try:
        return ModelSpec(name=opt["model"], dim=int(opt["k"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _outdir(opt):
    out = pathlib.Path(opt.get("output_dir")
                       or os.environ.get("LATNET_OUTDIR", "."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


# -- commands ---------------------------------------------------------------

def cmd_describe(opt):
    net = _load_network(opt["input"])
    stats = network_stats(net)
    out = _outdir(opt)
    with open(out / "stats.json", "w") as fh:
        json.dump(stats.as_dict(), fh, indent=2)
    _write_csv(out / "stats.csv", ["stat", "value"],
               [[k, f"{v:.3f}"] for k, v in stats.as_dict().items()])
    np.savetxt(out / "degree_sequence.csv", stats.degree_sequence,
               fmt="%d", header="degree", comments="")
    for k, v in stats.as_dict().items():
        if k == "edge_count":
            print(f"{k},{v}")
        else:
            print(f"{k},{v:.3f}")
    return 0


def _fit_exports(samples, net, out):
    probs = in_sample_probs(samples, net)
    di, dj = samples.dyads[:, 0], samples.dyads[:, 1]
    mat = np.zeros((net.n_actors, net.n_actors))
    mat[di, dj] = mat[dj, di] = probs
    np.savetxt(out / "interaction_probs.csv", mat, delimiter=",", fmt="%.6f")

    if samples.model == "distance":
        from .distance import align_samples
        aligned = align_samples(samples)
        np.savetxt(out / "positions_mean.csv", aligned.param("u").mean(axis=0),
                   delimiter=",", fmt="%.6f")
    elif samples.model == "class":
        from .blockmodel import co_membership, partition_point_estimate
        cm = co_membership(samples)
        np.savetxt(out / "co_membership.csv", cm, delimiter=",", fmt="%.6f")
        labels = partition_point_estimate(cm)
        _write_csv(out / "partition.csv", ["actor", "cluster"],
                   [[i, int(c) + 1] for i, c in enumerate(labels)])
    elif samples.model == "eigen":
        lam = samples.param("lambda")
        q = np.quantile(lam, [0.025, 0.5, 0.975], axis=0)
        _write_csv(out / "lambda_summary.csv",
                   ["component", "mean", "q025", "median", "q975"],
                   [[k, f"{lam[:, k].mean():.6f}", f"{q[0, k]:.6f}",
                     f"{q[1, k]:.6f}", f"{q[2, k]:.6f}"]
                    for k in range(lam.shape[1])])


def cmd_fit(opt):
    net = _load_network(opt["input"])
    spec = _model_spec(opt)
    cfg = _mcmc_config(opt)
    samples = run_chains(spec.build(net), net, cfg)
    out = _outdir(opt)
    samples.save(out)
    rhat = samples.rhat_table()
    _write_csv(out / "rhat.csv", ["param", "rhat"],
               [[k, f"{v:.4f}"] for k, v in rhat.items()])
    flagged = [k for k, v in rhat.items() if np.isfinite(v) and v > 1.1]
    manifest_path = out / "manifest.json"
    manifest = json.loads(manifest_path.read_text())
    manifest["rhat"] = rhat
    if flagged:
        manifest["warnings"] = [
            f"R-hat above 1.1 for: {', '.join(flagged)}; chains may not have mixed"]
        print(f"warning: R-hat above 1.1 for {', '.join(flagged)}",
              file=sys.stderr)
    manifest_path.write_text(json.dumps(manifest, indent=2))
    _fit_exports(samples, net, out)
    auc = in_sample_auc(samples, net)
    print(f"model,{samples.model}")
    print(f"in_sample_auc,{auc:.3f}")
    return 0


def cmd_cv(opt):
    if int(opt["n_folds"]) < 2:
        raise ConfigError("n_folds must be >= 2")
    net = _load_network(opt["input"])
    spec = _model_spec(opt)
    cfg = _mcmc_config(opt)
    res = cross_validate(net, spec, cfg, n_folds=int(opt["n_folds"]),
                         seed=int(opt["seed"]), n_jobs=int(opt["n_jobs"]))
    out = _outdir(opt)
    with open(out / "cv.json", "w") as fh:
        json.dump({"model": spec.name, "k": spec.dim, **res}, fh, indent=2)
    for f, a in enumerate(res["auc_per_fold"]):
        print(f"fold{f},{a:.3f}")
    print(f"auc_mean,{res['auc_mean']:.3f}")
    return 0


def _gof_report(samples, net, opt):
    report = information_criteria(samples, net)
    report.ppc = posterior_predictive(samples, net, seed=int(opt["seed"]))
    return report


def cmd_gof(opt):
    net = _load_network(opt["input"])
    if opt.get("samples_dir"):
        samples = PosteriorSamples.load(opt["samples_dir"])
    elif opt.get("refit"):
        spec = _model_spec(opt)
        samples = run_chains(spec.build(net), net, _mcmc_config(opt))
    else:
        raise ConfigError("provide --samples-dir or pass --refit")
    report = _gof_report(samples, net, opt)
    out = _outdir(opt)
    report.to_json(out / "report.json")
    report.ppc_to_csv(out / "ppc.csv")
    print(f"waic,{report.waic:.1f}")
    print(f"dic,{report.dic:.1f}")
    return 0


def cmd_compare(opt):
    net = _load_network(opt["input"])
    models = [m.strip() for m in str(opt["models"]).split(",") if m.strip()]
    try:
        k_list = sorted(int(k) for k in str(opt["k_list"]).split(",") if k.strip())
    except ValueError as exc:
        raise ConfigError(f"bad k_list: {opt['k_list']}") from exc
    if not models or not k_list:
        raise ConfigError("models and k_list must be non-empty")
    cfg = _mcmc_config(opt)
    rows = []
    best = {}
    for name in models:
        for k in k_list:
            spec = ModelSpec(name=name, dim=k)
            samples = run_chains(spec.build(net), net, cfg)
            w, _ = information_criteria(samples, net).waic, None
            rows.append({"model": name, "k": k, "waic": w})
            # smallest K wins ties by strict < over ascending K
            if name not in best or w < best[name][1]:
                best[name] = (k, w)
    winner = min(best, key=lambda m: (best[m][1], best[m][0]))
    out = _outdir(opt)
    _write_csv(out / "comparison.csv", ["model", "k", "waic", "best_for_model",
                                        "overall_best"],
               [[r["model"], r["k"], f"{r['waic']:.1f}",
                 int(best[r["model"]][0] == r["k"]),
                 int(r["model"] == winner and best[winner][0] == r["k"])]
                for r in rows])
    for r in rows:
        print(f"{r['model']},K={r['k']},waic={r['waic']:.1f}")
    print(f"best,{winner},K={best[winner][0]},waic={best[winner][1]:.1f}")
    return 0


# -- argument parsing -------------------------------------------------------

def _add_common(p, fit_opts=True):
    p.add_argument("--input", required=False, help="edge-list path or bundled "
                   f"dataset name {DATASET_NAMES}")
    p.add_argument("--config", help="flat JSON config file; flags override it")
    p.add_argument("--output-dir", dest="output_dir")
    p.add_argument("--seed", type=int)
    if fit_opts:
        p.add_argument("--model", choices=("distance", "class", "eigen"))
        p.add_argument("--k", type=int)
        p.add_argument("--iters", dest="n_iter", type=int)
        p.add_argument("--burn-in", dest="burn_in", type=int)
        p.add_argument("--thin", type=int)
        p.add_argument("--chains", dest="n_chains", type=int)
        p.add_argument("--n-jobs", dest="n_jobs", type=int)
        p.add_argument("--loglik-dtype", dest="loglik_dtype",
                       choices=("float32", "float64"))


def build_parser():
    parser = argparse.ArgumentParser(
        prog="latnet",
        description="Latent space models for binary networks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("describe", help="descriptive network statistics")
    _add_common(p, fit_opts=False)
    p.set_defaults(func=cmd_describe)

    p = sub.add_parser("fit", help="fit a model and export posterior summaries")
    _add_common(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("cv", help="k-fold link-prediction cross-validation")
    _add_common(p)
    p.add_argument("--n-folds", dest="n_folds", type=int)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("gof", help="WAIC/DIC and posterior predictive checks")
    _add_common(p)
    p.add_argument("--samples-dir", dest="samples_dir")
    p.add_argument("--refit", action="store_const", const=True, default=None)
    p.set_defaults(func=cmd_gof)

    p = sub.add_parser("compare", help="WAIC comparison over models and K grid")
    _add_common(p)
    p.add_argument("--models")
    p.add_argument("--k-list", dest="k_list")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opt = _merge_options(args)
        if not opt.get("input"):
            raise ConfigError("--input is required (flag or config)")
        return args.func(opt)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
