"""Command-line interface: ``mmisomap generate | embed | evaluate``.

Exit codes: 0 success, 2 usage, 3 algorithmic failure, 4 I/O.
"""

import argparse
import json
import os
import sys
import time
import warnings

import numpy as np

from . import synth
from .dcisomap import DEFAULT_BETA, DEFAULT_GAMMAS, dc_isomap
from .errors import CsvFormatError, EmbeddingError
from .graph import pairwise_distances
from .isomap import isomap_geodesics, kcc_geodesics
from .linalg import pca_embed
from .mds import classical_mds
from .metrics import (embedding_distances, geodesic_preservation,
                      procrustes_residual, residual_variance)
from .misomap import m_isomap

SCHEMA = 1
EXIT_USAGE, EXIT_ALGORITHM, EXIT_IO = 2, 3, 4
METHODS = ("pca", "mds", "isomap", "kcc", "m-isomap", "dc", "dc-revised")


class UsageError(Exception):
    pass


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser():
    parser = argparse.ArgumentParser(prog="mmisomap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic multi-manifold dataset")
    gen.add_argument("dataset", choices=sorted(synth.GENERATORS))
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)

    emb = sub.add_parser("embed", help="embed a point CSV")
    emb.add_argument("method", choices=METHODS)
    emb.add_argument("--in", dest="input", required=True)
    nbr = emb.add_mutually_exclusive_group()
    nbr.add_argument("--k", type=int)
    nbr.add_argument("--eps", type=float)
    emb.add_argument("--d", type=int, default=2)
    emb.add_argument("--per-manifold-k", type=_int_list)
    emb.add_argument("--lambda", dest="lam", type=float)
    emb.add_argument("--beta", type=float, default=DEFAULT_BETA)
    emb.add_argument("--gammas", type=_float_list, default=list(DEFAULT_GAMMAS))
    emb.add_argument("--out", required=True)
    emb.add_argument("--report")
    emb.add_argument("--plot-data", help="directory for per-manifold 2-D scatter CSVs")
    emb.add_argument("--figure", help="render a scatter plot (needs matplotlib)")
    emb.add_argument("--save-distances", help="write the geodesic distance matrix")
    emb.add_argument("--threads", type=int, default=1)

    ev = sub.add_parser("evaluate", help="score an embedding against a reference")
    ev.add_argument("embedding")
    ev.add_argument("--reference", required=True)
    ev.add_argument("--reference-kind", choices=("auto", "geodesic", "points"), default="auto")
    ev.add_argument("--mode", choices=("preservation", "procrustes", "residual-variance"),
                    required=True)
    ev.add_argument("--out")
    return parser


def cmd_generate(args):
    try:
        points = synth.GENERATORS[args.dataset](args.n, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc))
    synth.save_csv(args.out, points.coords, points.labels)
    print(f"wrote {args.out}: n={points.n} dim={points.dim} M={points.n_labels}")
    return 0


def _require_k(args, method):
    if args.k is None:
        raise UsageError(f"method {method} needs --k")
    return args.k


def _run_method(args, X, report, timings):
    """Dispatch one embedding method; returns (embedding, labels, geodesics)."""
    method, d = args.method, args.d
    if method == "pca":
        return pca_embed(X, d), None, None
    if method == "mds":
        D = pairwise_distances(X)
        return classical_mds(D, d), None, D
    if method == "isomap":
        if args.k is None and args.eps is None:
            raise UsageError("isomap needs --k or --eps")
        t0 = time.perf_counter()
        D = isomap_geodesics(X, k=args.k, eps=args.eps)
        timings["geodesics"] = time.perf_counter() - t0
        report["M"] = 1
        return classical_mds(D, d), None, D
    k = _require_k(args, method)
    if method == "kcc":
        t0 = time.perf_counter()
        D, G, comps = kcc_geodesics(X, k)
        timings["geodesics"] = time.perf_counter() - t0
        report.update(M=comps.M, manifold_sizes=comps.sizes(), k_used=k,
                      inter_edges={f"{a}-{b}": len(e) for (a, b), e in G.inter_edges.items()})
        return classical_mds(D, d), comps.labels, D
    if method == "m-isomap":
        res = m_isomap(X, d, k=k, per_manifold_k=args.per_manifold_k, lam=args.lam,
                       workers=args.threads)
        dec = res.decomposition
        report.update(
            M=dec.M, manifold_sizes=res.components.sizes(), k_used=k,
            per_manifold_k=[m.k for m in dec.manifolds],
            inter_edges={f"{a}-{b}": len(e) for (a, b), e in dec.inter_edges.items()},
            skeleton_size=None if res.skeleton is None else len(res.skeleton.global_members),
            max_orthonormality_error=max(t.orthonormality_error() for t in res.transforms))
        timings.update(res.timings)
        return res.embedding, res.components.labels, None
    res = dc_isomap(X, d, k, revised=(method == "dc-revised"),
                    per_cluster_k=args.per_manifold_k, beta=args.beta,
                    gamma_schedule=args.gammas, workers=args.threads)
    dec = res.decomposition
    report.update(
        M=dec.M, manifold_sizes=res.components.sizes(), k_used=k,
        per_manifold_k=[m.k for m in dec.manifolds], centers=res.centers,
        fictitious_clusters=[{"position": f.position.tolist(), "gamma": f.gamma,
                              "ratio": f.ratio, "pair": [p + 1 for p in f.pair]}
                             for f in res.fictitious],
        max_orthonormality_error=max(t.orthonormality_error() for t in res.transforms))
    timings.update(res.timings)
    return res.embedding, res.components.labels, None


def cmd_embed(args):
    if args.d < 1:
        raise UsageError("--d must be positive")
    if args.threads < 1:
        raise UsageError("--threads must be positive")
    started = time.perf_counter()
    timings = {}
    t0 = time.perf_counter()
    points = synth.load_csv(args.input)
    timings["load"] = time.perf_counter() - t0
    report = {"schema": SCHEMA, "method": args.method, "input": os.path.basename(args.input),
              "n": points.n, "dim": points.dim, "d": args.d, "k": args.k, "eps": args.eps,
              "M": None}
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            Y, labels, D = _run_method(args, points.coords, report, timings)
        except ValueError as exc:
            if isinstance(exc, EmbeddingError):
                raise
            raise UsageError(str(exc))
    report["warnings"] = [{"category": w.category.__name__, "message": str(w.message)}
                          for w in caught]

    t0 = time.perf_counter()
    synth.save_csv(args.out, Y, labels)
    if args.save_distances:
        if D is None:
            raise UsageError(f"--save-distances is not available for {args.method}")
        synth.save_csv(args.save_distances, D)
    if args.plot_data:
        os.makedirs(args.plot_data, exist_ok=True)
        groups = [(0, np.arange(len(Y)))] if labels is None else \
            [(lab, np.nonzero(labels == lab)[0]) for lab in np.unique(labels)]
        for lab, idx in groups:
            name = "embedding.csv" if labels is None else f"manifold_{lab}.csv"
            synth.save_csv(os.path.join(args.plot_data, name), Y[idx, :2])
    if args.figure:
        try:
            from .plotting import scatter_embedding
            scatter_embedding(Y, labels, args.figure, title=args.method)
        except ImportError:
            raise UsageError("--figure needs matplotlib (pip install artifact[plot])")
    timings["write"] = time.perf_counter() - t0
    timings["total"] = time.perf_counter() - started
    report["timings"] = timings
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
    summary = f"{args.method}: n={points.n} d={args.d}"
    if report.get("M") is not None:
        summary += f" M={report['M']}"
    print(summary)
    return 0


def _is_distance_matrix(A):
    return (A.shape[0] == A.shape[1] and np.allclose(A, A.T)
            and np.all(np.diag(A) == 0))


def cmd_evaluate(args):
    Y = synth.load_csv(args.embedding).coords
    ref = synth.load_csv(args.reference).coords
    if len(ref) != len(Y):
        raise UsageError(f"embedding has {len(Y)} rows but reference has {len(ref)}")
    kind = args.reference_kind
    if kind == "auto":
        kind = "geodesic" if _is_distance_matrix(ref) else "points"
    result = {"schema": SCHEMA, "mode": args.mode, "reference_kind": kind, "n": len(Y)}
    try:
        if args.mode == "procrustes":
            if kind != "points":
                raise UsageError("procrustes needs a points reference")
            if ref.shape[1] != Y.shape[1]:
                raise UsageError(f"dimension mismatch: {Y.shape[1]} vs {ref.shape[1]}")
            result["procrustes_residual"] = procrustes_residual(ref, Y)
        else:
            D_ref = ref if kind == "geodesic" else pairwise_distances(ref)
            if args.mode == "preservation":
                worst, mean = geodesic_preservation(Y, D_ref)
                result["max_relative_error"] = worst
                result["mean_relative_error"] = mean
            else:
                result["residual_variance"] = residual_variance(D_ref, embedding_distances(Y))
    except ValueError as exc:
        if isinstance(exc, CsvFormatError):
            raise
        raise UsageError(str(exc))
    text = json.dumps(result, indent=2)
    print(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    handler = {"generate": cmd_generate, "embed": cmd_embed, "evaluate": cmd_evaluate}
    try:
        return handler[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EmbeddingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ALGORITHM
    except (OSError, CsvFormatError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
