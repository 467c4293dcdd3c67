"""Command-line frontend.

Every randomized subcommand requires an explicit --seed; a run is fully
determined by its configuration and seed, and every output file embeds
both.  Exit codes: 0 success, 1 check failure, 2 usage error.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, clustering, codes, completion, graphgen, spectra
from .numkernel import rng_from_seed, rng_substream


_NON_CONFIG_KEYS = {
    "func", "output", "output_prefix", "solution_output", "csv_output",
}


def _config_blob(args, **extra):
    cfg = {
        k: v for k, v in vars(args).items()
        if k not in _NON_CONFIG_KEYS and v is not None
    }
    cfg.update(extra)
    return {"config": cfg, "version": __version__}


def _emit_json(payload, path):
    text = json.dumps(payload, sort_keys=True, indent=2, default=str) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as f:
            f.write(text)


def _write_lines(lines, path):
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def _worker_count():
    try:
        return max(1, int(os.environ.get("BIREG_THREADS", "1")))
    except ValueError:
        return 1


def _map_seeds(fn, count):
    """Run fn(index) for index in range(count); concurrency never changes
    content because each index derives its own stream."""
    workers = _worker_count()
    if workers == 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(count)))


# ---------------------------------------------------------------------------
# subcommands


def cmd_sample(args):
    rng = rng_from_seed(args.seed)
    if args.simple:
        g = graphgen.sample_simple(
            args.n, args.m, args.d1, args.d2, rng, args.max_attempts
        )
    elif args.exploration:
        g = graphgen.sample_exploration(args.n, args.m, args.d1, args.d2, rng)
    else:
        g = graphgen.sample_configuration(args.n, args.m, args.d1, args.d2, rng)
    payload = _config_blob(args)
    payload.update(graphgen.graph_to_json_dict(g))
    payload["simple"] = g.simple
    payload["attempts"] = g.attempts
    _emit_json(payload, args.output)
    return 0


def cmd_spectrum(args):
    rng = rng_from_seed(args.seed)
    g = graphgen.sample_simple(
        args.n, args.m, args.d1, args.d2, rng, args.max_attempts
    )
    spec = spectra.adjacency_spectrum(g)
    nb = spectra.spectrum_B_from_A(spec)
    prefix = args.output_prefix
    _write_lines(spectra.adjacency_csv_lines(spec), f"{prefix}_A.csv")
    _write_lines(spectra.nb_csv_lines(nb), f"{prefix}_B.csv")
    meta = _config_blob(args)
    meta.update({
        "circle_radius": float(((g.d1 - 1) * (g.d2 - 1)) ** 0.25),
        "leading_adjacency": float(np.sqrt(g.d1 * g.d2)),
        "leading_nb_modulus": nb.leading_modulus(),
        "eta": spec.eta,
        "rank": spec.rank_r,
        "files": [f"{prefix}_A.csv", f"{prefix}_B.csv"],
    })
    _emit_json(meta, f"{prefix}_meta.json")
    return 0


def cmd_gap_check(args):
    def one(i):
        rng = rng_substream(args.seed, i)
        g = graphgen.sample_simple(
            args.n, args.m, args.d1, args.d2, rng, args.max_attempts
        )
        return spectra.gap_certificate(g, args.epsilon)

    certs = _map_seeds(one, args.seeds)
    names = [c.name for c in certs[0].checks]
    rates = {}
    for name in names:
        checks = [c.check(name) for c in certs]
        informative = [c for c in checks if c.informative]
        rates[name] = {
            "pass_rate": (
                sum(c.passed for c in informative) / len(informative)
                if informative else None
            ),
            "informative_runs": len(informative),
            "bound": checks[0].bound,
        }
    payload = _config_blob(args)
    payload["rates"] = rates
    payload["runs"] = len(certs)
    failed = any(
        r["pass_rate"] is not None and r["pass_rate"] < args.min_rate
        for r in rates.values()
    )
    payload["passed"] = not failed
    _emit_json(payload, args.output)
    return 1 if failed else 0


def cmd_tangle_check(args):
    rng = rng_from_seed(args.seed)
    if args.simple:
        g = graphgen.sample_simple(
            args.n, args.m, args.d1, args.d2, rng, args.max_attempts
        )
    else:
        g = graphgen.sample_configuration(args.n, args.m, args.d1, args.d2, rng)
    rep = graphgen.tangle_free(g, args.ell)
    payload = _config_blob(args)
    payload.update({
        "ell": rep.ell,
        "worst_excess": rep.worst_excess,
        "tangle_free": rep.tangle_free,
        "worst_vertex": rep.worst_vertex,
    })
    _emit_json(payload, args.output)
    return 0 if rep.tangle_free else 1


def cmd_ihara_verify(args):
    rng = rng_from_seed(args.seed)
    g = graphgen.sample_simple(
        args.n, args.m, args.d1, args.d2, rng, args.max_attempts
    )
    B = spectra.build_B(g)
    rows = []
    worst = 0.0
    drawn = 0
    while drawn < args.points:
        radius = rng.uniform(0.5, 3.0)
        angle = rng.uniform(0.0, 2.0 * np.pi)
        lam = radius * np.exp(1j * angle)
        if abs(lam - 1.0) < 0.1 or abs(lam + 1.0) < 0.1:
            continue
        drawn += 1
        res = spectra.ihara_bass_residual(g, lam, B=B)
        worst = max(worst, res.log_modulus_discrepancy, res.argument_discrepancy)
        rows.append({
            "re": lam.real,
            "im": lam.imag,
            "log_modulus_discrepancy": res.log_modulus_discrepancy,
            "argument_discrepancy": res.argument_discrepancy,
        })
    if args.csv:
        lines = ["re,im,log_modulus_discrepancy,argument_discrepancy"] + [
            "{re!r},{im!r},{log_modulus_discrepancy!r},"
            "{argument_discrepancy!r}".format(**r)
            for r in rows
        ]
        if args.output in (None, "-"):
            sys.stdout.write("\n".join(lines) + "\n")
        else:
            _write_lines(lines, args.output)
    else:
        payload = _config_blob(args)
        payload["residuals"] = rows
        payload["worst"] = worst
        payload["passed"] = worst <= args.tol
        _emit_json(payload, args.output)
    return 0 if worst <= args.tol else 1


def _load_frame(path):
    with open(path) as f:
        return graphgen.Frame.from_json_dict(json.load(f))


def cmd_frame_sample(args):
    frame = _load_frame(args.frame)
    rng = rng_from_seed(args.seed)
    fg = graphgen.sample_frame_graph(args.n_total, frame, rng, args.max_attempts)
    payload = _config_blob(args)
    payload.update({
        "frame": frame.to_json_dict(),
        "n_total": fg.n_total,
        "labels": list(fg.labels),
        "edges": [list(e) for e in fg.edges],
    })
    _emit_json(payload, args.output)
    return 0


def cmd_cluster(args):
    frame = _load_frame(args.frame)
    rng = rng_from_seed(args.seed)
    fg = graphgen.sample_frame_graph(args.n_total, frame, rng, args.max_attempts)
    K = args.k if args.k is not None else frame.K
    result = clustering.spectral_cluster(fg, K, tol=args.tol)
    acc = clustering.cluster_accuracy(result.assignment, fg.labels)
    if args.csv_output:
        lines = ["vertex,true_label,assigned_label"]
        lines += [
            f"{v},{t},{a}"
            for v, (t, a) in enumerate(zip(fg.labels, result.assignment))
        ]
        _write_lines(lines, args.csv_output)
    payload = _config_blob(args)
    payload.update({
        "accuracy": acc,
        "clusters_found": result.num_clusters(),
        "eigengap": result.eigengap,
        "reliable": result.reliable,
    })
    _emit_json(payload, args.output)
    if args.min_accuracy is not None and acc < args.min_accuracy:
        return 1
    return 0


def cmd_rsbm_thresholds(args):
    th = clustering.rsbm_thresholds(args.d1, args.d2)
    payload = _config_blob(args)
    payload.update({
        "brito_holds": th.brito_holds,
        "spectral_holds": th.spectral_holds,
        "brito_margin": th.brito_margin,
        "spectral_margin": th.spectral_margin,
    })
    _emit_json(payload, args.output)
    return 0


def cmd_tanner_bound(args):
    payload = _config_blob(args)
    if args.paper_example:
        report = codes.paper_example_report()
    elif args.code_spec:
        code = codes.load_tanner_code(args.code_spec)
        g = code.graph
        eta = spectra.adjacency_spectrum(g).eta
        report = codes.janwa_lal_bound(
            g.n, g.d1, g.d2,
            code.c1.design_distance, code.c2.design_distance, eta,
            k1=code.c1.dim, k2=code.c2.dim,
        )
        payload["eta_measured"] = eta
        payload["dimension"] = codes.code_dimension(code)
        if args.brute_force:
            payload["min_distance_exact"] = codes.min_distance_bruteforce(code)
    else:
        required = [args.n, args.d1, args.d2, args.delta1, args.delta2]
        if any(v is None for v in required):
            raise graphgen.ParameterError(
                "need --n --d1 --d2 --delta1 --delta2 "
                "(or --paper-example / --code-spec)"
            )
        report = codes.corollary_bound(
            args.n, args.d1, args.d2, args.delta1, args.delta2, args.epsilon,
            k1=args.k1, k2=args.k2,
        )
    payload.update(report.to_json_dict())
    _emit_json(payload, args.output)
    return 0


def _instance_from_args(args):
    rng = rng_from_seed(args.seed)
    mask = graphgen.sample_simple(
        args.n, args.m, args.d1, args.d2, rng, args.max_attempts
    )
    noise = args.delta if args.noisy else None
    return completion.rank_one_instance(mask, rng, noise_delta=noise)


def _instance_from_file(path):
    with open(path) as f:
        data = json.load(f)
    if "mask_file" in data:
        mask = graphgen.load_graph(data["mask_file"])
    else:
        mask = graphgen.graph_from_json_dict(data["mask"])
    if "Y" not in data:
        gen = data["generator"]
        if gen.get("kind", "rank_one") != "rank_one":
            raise graphgen.ParameterError(f"unknown generator {gen.get('kind')}")
        rng = rng_from_seed(gen["seed"])
        return completion.rank_one_instance(
            mask, rng, noise_delta=gen.get("delta")
        )
    Z = np.array(data["Z"], dtype=float) if data.get("Z") is not None else None
    return completion.CompletionInstance(
        Y=np.array(data["Y"], dtype=float),
        mask=mask,
        Z=Z,
        delta=float(data.get("delta", 0.0)),
    )


def cmd_complete(args):
    if args.instance:
        inst = _instance_from_file(args.instance)
    else:
        inst = _instance_from_args(args)
    sol = completion.solve_trace_norm(inst, max_iter=args.max_iter, tol=args.tol)
    cert = completion.certify(inst, sol.X_hat, epsilon=args.epsilon)
    payload = _config_blob(args)
    payload.update({
        "iterations": sol.iterations,
        "residual_rms": sol.residual_rms,
        "converged": sol.converged,
        "trace_norm": sol.trace_norm,
        "certificate": cert.to_json_dict(),
    })
    if args.solution_output:
        _emit_json({"X_hat": sol.X_hat.tolist()}, args.solution_output)
    _emit_json(payload, args.output)
    return 0 if (sol.converged and cert.satisfied) else 1


def cmd_certify(args):
    inst = _instance_from_file(args.instance)
    with open(args.solution) as f:
        X_hat = np.array(json.load(f)["X_hat"], dtype=float)
    cert = completion.certify(inst, X_hat, epsilon=args.epsilon)
    payload = _config_blob(args)
    payload.update(cert.to_json_dict())
    _emit_json(payload, args.output)
    return 0 if cert.satisfied else 1


def cmd_edge_prob(args):
    rng = rng_from_seed(args.seed)
    H = []
    if args.cond:
        flat = args.cond
        if len(flat) % 2 != 0:
            raise graphgen.ParameterError("--cond takes flat L R pairs")
        H = [(flat[i], flat[i + 1]) for i in range(0, len(flat), 2)]
    est = graphgen.conditional_edge_probability(
        args.n, args.m, args.d1, args.d2, H, tuple(args.edge), args.trials, rng
    )
    payload = _config_blob(args)
    payload.update({
        "p_hat": est.p_hat,
        "std_err": est.std_err,
        "effective_samples": est.effective_samples,
        "trials": est.trials,
        "reference_isolated": args.d2 / args.n,
    })
    _emit_json(payload, args.output)
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_graph_params(p, simple_flag=True):
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--d1", type=int, required=True)
    p.add_argument("--d2", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--max-attempts", type=int, default=20000)
    if simple_flag:
        p.add_argument("--simple", action="store_true")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="bireg",
        description="Bipartite biregular random graphs: sampling, spectra, "
                    "certificates, and applications.",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample a graph and write JSON")
    _add_graph_params(p)
    p.add_argument("--exploration", action="store_true")
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("spectrum", help="adjacency and non-backtracking spectra CSVs")
    _add_graph_params(p, simple_flag=False)
    p.add_argument("--output-prefix", default="spectrum")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("gap-check", help="gap certificate pass rates over seeds")
    _add_graph_params(p, simple_flag=False)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--seeds", type=int, default=50)
    p.add_argument("--min-rate", type=float, default=0.9)
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_gap_check)

    p = sub.add_parser("tangle-check", help="tangle-freeness of a sampled graph")
    _add_graph_params(p)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_tangle_check)

    p = sub.add_parser("ihara-verify", help="determinant identity residuals")
    _add_graph_params(p, simple_flag=False)
    p.add_argument("--points", type=int, default=10)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--csv", action="store_true",
                   help="emit the residual table as CSV instead of JSON")
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_ihara_verify)

    p = sub.add_parser("frame-sample", help="sample a frame graph")
    p.add_argument("--frame", required=True, help="frame JSON file")
    p.add_argument("--n-total", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--max-attempts", type=int, default=20000)
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_frame_sample)

    p = sub.add_parser("cluster", help="spectral clustering of a frame graph")
    p.add_argument("--frame", required=True)
    p.add_argument("--n-total", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-attempts", type=int, default=20000)
    p.add_argument("--min-accuracy", type=float)
    p.add_argument("--csv-output")
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("rsbm-thresholds", help="regular SBM threshold comparison")
    p.add_argument("--d1", type=int, required=True)
    p.add_argument("--d2", type=int, required=True)
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_rsbm_thresholds)

    p = sub.add_parser("tanner-bound", help="Tanner code rate/distance bounds")
    p.add_argument("--paper-example", action="store_true")
    p.add_argument("--code-spec", help="code spec JSON: measured-eta bound")
    p.add_argument("--brute-force", action="store_true",
                   help="with --code-spec: also compute the exact distance")
    p.add_argument("--n", type=int)
    p.add_argument("--d1", type=int)
    p.add_argument("--d2", type=int)
    p.add_argument("--delta1", type=float)
    p.add_argument("--delta2", type=float)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--k1", type=int)
    p.add_argument("--k2", type=int)
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_tanner_bound)

    p = sub.add_parser("complete", help="trace-norm completion + certificate")
    _add_graph_params(p, simple_flag=False)
    p.add_argument("--instance", help="instance JSON file (overrides params)")
    p.add_argument("--noisy", action="store_true")
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--max-iter", type=int, default=5000)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--solution-output")
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_complete)

    p = sub.add_parser("certify", help="certificate for an existing solution")
    p.add_argument("--instance", required=True)
    p.add_argument("--solution", required=True)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("edge-prob", help="conditional edge probability MC")
    _add_graph_params(p, simple_flag=False)
    p.add_argument("--edge", type=int, nargs=2, required=True, metavar=("L", "R"))
    p.add_argument("--cond", type=int, nargs="*", metavar="V",
                   help="conditioning edges as flat L R pairs")
    p.add_argument("--trials", type=int, default=1_000_000)
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_edge_prob)

    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (graphgen.ParameterError, graphgen.FrameError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (graphgen.BudgetExhausted, codes.HypothesisError,
            spectra.SpectraError, clustering.ClusteringError,
            completion.CompletionError, codes.CodeError) as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
