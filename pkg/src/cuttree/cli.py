"""Command-line entry point: ``cuttree <command> ...``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings

import numpy as np

from .cutting import cut_complete, cut_k, cut_one, record_from_dict
from .icrt import ThetaParam, build_pn, genealogy_matrix, line_break, survival_eta1
from .ptree import ProbWeights, RootedTree, sample_ptree
from .randomness import make_rng, resolve_seed, run_chunked
from .shuffle import reverse_exact, shuff_complete, shuff_k

EXIT_FAIL = 1
EXIT_UNKNOWN_SUITE = 2
EXIT_BAD_JSON = 3
EXIT_BAD_INPUT = 4

COMMON_DEFAULTS = {"seed": None, "out": None, "format": "json", "threads": 1}


class InputError(Exception):
    def __init__(self, message, code=EXIT_BAD_INPUT):
        super().__init__(message)
        self.code = code


def _load_json(text, what):
    """Parse JSON given inline or as a file path."""
    source = what
    if not text.lstrip().startswith(("[", "{")) and not _is_number(text):
        try:
            with open(text) as fh:
                source = text
                text = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read {what} from {text!r}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {source} at line {exc.lineno} "
                         f"column {exc.colno}: {exc.msg}", EXIT_BAD_JSON) from None


def _is_number(text):
    try:
        float(text)
        return True
    except ValueError:
        return False


def _theta(text):
    data = _load_json(text, "--theta")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            th = ThetaParam.parse(data)
        except (ValueError, TypeError) as exc:
            raise InputError(f"invalid --theta: {exc}") from None
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return th


def _weights(args, n=None):
    if getattr(args, "weights", None):
        try:
            w = ProbWeights(_load_json(args.weights, "--weights"))
        except (ValueError, TypeError) as exc:
            if isinstance(exc, InputError):
                raise
            raise InputError(f"invalid weights: {exc}") from None
        if n is not None and w.n != n:
            raise InputError("incompatible dimensions")
        return w
    n = n or getattr(args, "n", None)
    if not n:
        raise InputError("give -n or --weights")
    return ProbWeights.uniform(n)


def _int_list(text):
    return [int(x) for x in text.replace(",", " ").split()]


def _emit(args, payload, rows=None, header=None):
    """Write JSON (default) or CSV to --out or stdout."""
    if args.format == "csv":
        if rows is None:
            raise InputError("this command has no CSV form")
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(header)
        for r in rows:
            wr.writerow(r)
        text = buf.getvalue()
    else:
        text = json.dumps(payload, sort_keys=False) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_sample_tree(args):
    w = _weights(args)
    rng = make_rng(args.seed)
    trees = [sample_ptree(w, rng) for _ in range(args.count)]
    if args.count == 1:
        payload = dict(trees[0].to_dict(), seed=args.seed)
    else:
        payload = {"seed": args.seed, "trees": [t.to_dict() for t in trees]}
    rows = [(i, v, t.parent.get(v, 0)) for i, t in enumerate(trees) for v in sorted(t.vertices)]
    _emit(args, payload, rows, ["tree", "vertex", "parent"])
    return 0


def _tree_and_weights(args, rng):
    if args.tree:
        data = _load_json(args.tree, "--tree")
        try:
            tree = RootedTree.from_dict(data)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        return tree, _weights(args, len(tree))
    w = _weights(args)
    return sample_ptree(w, rng), w


def cmd_cut(args):
    rng = make_rng(args.seed)
    if args.replicas:
        if not args.one:
            raise InputError("--replicas is available with --one only")
        w = _weights(args)

        def job(r, c):
            out = []
            for _ in range(c):
                t = sample_ptree(w, r)
                v = w.draw(r)
                out.append((cut_one(t, w, v, r).n_cuts, t.depth(v) + 1))
            return out

        rows = run_chunked(job, args.replicas, args.seed, (101,), args.threads)
        payload = {"seed": args.seed, "L": [a for a, _ in rows], "span": [b for _, b in rows]}
        _emit(args, payload, rows, ["L", "span"])
        return 0
    tree, w = _tree_and_weights(args, rng)
    try:
        if args.complete:
            rec = cut_complete(tree, w, rng)
        elif args.k:
            targets = _int_list(args.targets) if args.targets else [w.draw(rng) for _ in range(2)]
            rec = cut_k(tree, w, targets, rng)
        else:
            v = args.target if args.target is not None else w.draw(rng)
            rec = cut_one(tree, w, v, rng)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    payload = dict(rec.to_dict(), seed=args.seed)
    rows = [(i + 1, x) for i, x in enumerate(rec.cuts)]
    _emit(args, payload, rows, ["step", "cut"])
    return 0


def cmd_shuff(args):
    rng = make_rng(args.seed)
    data = _load_json(args.input, "--input")
    try:
        if args.mode == "reverse-exact":
            out = reverse_exact(record_from_dict(data))
        else:
            tree = RootedTree.from_dict(data)
            w = _weights(args, len(tree))
            if args.mode == "complete":
                out = shuff_complete(tree, w, rng)
            else:
                if args.targets:
                    targets = _int_list(args.targets)
                elif args.target is not None:
                    targets = [args.target]
                elif "targets" in data:
                    targets = [int(x) for x in data["targets"]]
                else:
                    raise InputError("give --target/--targets or a record with targets")
                if args.mode == "one" and len(targets) != 1:
                    raise InputError("mode one takes a single target")
                out = shuff_k(tree, w, targets, rng)
    except (ValueError, KeyError) as exc:
        raise InputError(f"invalid input: {exc}") from None
    payload = dict(out.to_dict(), seed=args.seed)
    rows = [(v, out.parent.get(v, 0)) for v in sorted(out.vertices)]
    _emit(args, payload, rows, ["vertex", "parent"])
    return 0


def cmd_icrt(args):
    th = _theta(args.theta)
    if args.action == "survival":
        if args.r is not None:
            rs = [float(x) for x in args.r]
        else:
            rs = np.linspace(0.0, args.r_max, args.points).tolist()
        if any(r < 0 for r in rs):
            raise InputError("r must be nonnegative")
        vals = [survival_eta1(th, r) for r in rs]
        if len(rs) == 1:
            payload = {"theta": th.to_list(), "r": rs[0], "survival": vals[0]}
        else:
            payload = {"theta": th.to_list(), "r": rs, "survival": vals}
        _emit(args, payload, [(r, f"{v:.6f}") for r, v in zip(rs, vals)], ["r", "survival"])
        return 0
    if args.action == "line-break":
        rt = line_break(th, args.k, make_rng(args.seed))
        payload = dict(rt.to_dict(), seed=args.seed, theta=th.to_list())
        rows = [(v, rt.parent[v], rt.length[v]) for v in range(rt.n_vertices)]
        _emit(args, payload, rows, ["vertex", "parent", "length"])
        return 0
    # genealogy
    m = args.m if args.m is not None else 50 * args.k

    def job(r, c):
        return [genealogy_matrix(th, args.k, m, args.horizon, r) for _ in range(c)]

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        res = run_chunked(job, args.replicas, args.seed, (202,), args.threads, chunk=100)
    if caught:
        print(f"warning: {len(caught)} replica(s) hit the horizon; residuals reported",
              file=sys.stderr)
    payload = {
        "seed": args.seed, "theta": th.to_list(), "k": args.k, "m": m,
        "replicas": [
            {"matrix": g.matrix.tolist(), "L_inf": g.L_inf.tolist(),
             "horizon": g.horizon, "residual": g.residual.tolist()}
            for g in res
        ],
    }
    rows = [(i, j + 1, g.L_inf[j]) for i, g in enumerate(res) for j in range(args.k)]
    _emit(args, payload, rows, ["replica", "target", "L_inf"])
    return 0


def cmd_build_pn(args):
    th = _theta(args.theta)
    try:
        w = build_pn(th, args.n)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _emit(args, w.p.tolist(), [(i + 1, repr(x)) for i, x in enumerate(w.p)], ["label", "p"])
    return 0


def cmd_verify(args):
    from .verify import SUITES, run_suite

    if args.suite != "all" and args.suite not in SUITES:
        print(f"unknown suite {args.suite!r}; available: {', '.join(SUITES)}, all",
              file=sys.stderr)
        return EXIT_UNKNOWN_SUITE
    verdicts = run_suite(args.suite, args.seed, args.threads, args.scale)
    for v in verdicts:
        print(v.line(), file=sys.stderr)
    payload = [v.to_dict() for v in verdicts]
    rows = [(v.name, v.statistic, v.threshold, v.passed, v.seed, v.n_samples) for v in verdicts]
    _emit(args, payload, rows, ["name", "statistic", "threshold", "pass", "seed", "n_samples"])
    return 0 if all(v.passed for v in verdicts) else EXIT_FAIL


def cmd_bench(args):
    from .bench import run_benchmark

    result = run_benchmark(n=args.n, replicas=args.replicas, seed=args.seed)
    rows = [(r["kernel"], r["backend"], r["seconds"]) for r in result["timings"]]
    _emit(args, result, rows, ["kernel", "backend", "seconds"])
    return 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="master seed (default: $CUTTREE_SEED or a fixed value)")
    common.add_argument("--out", default=argparse.SUPPRESS, help="write output to this file")
    common.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help="worker threads for replicated runs")

    p = argparse.ArgumentParser(prog="cuttree", parents=[common],
                                description="Random p-trees, cutting and shuffling.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample-tree", parents=[common], help="draw p-trees",
                       description="Draw p-trees. CSV columns: tree,vertex,parent (0 = root).")
    s.add_argument("-n", type=int)
    s.add_argument("--weights", help="JSON array or file")
    s.add_argument("--count", type=int, default=1)
    s.set_defaults(func=cmd_sample_tree)

    c = sub.add_parser("cut", parents=[common], help="cut a tree",
                       description="Cut a tree. CSV columns: step,cut; with --replicas: L,span.")
    mode = c.add_mutually_exclusive_group(required=True)
    mode.add_argument("--one", action="store_true")
    mode.add_argument("--k", action="store_true")
    mode.add_argument("--complete", action="store_true")
    c.add_argument("--tree", help="tree JSON or file; sampled when omitted")
    c.add_argument("-n", type=int)
    c.add_argument("--weights")
    c.add_argument("--target", type=int)
    c.add_argument("--targets", help="comma separated")
    c.add_argument("--replicas", type=int, default=0,
                   help="emit (L, span size) pairs for fresh (T, V) instead of one record")
    c.set_defaults(func=cmd_cut)

    h = sub.add_parser("shuff", parents=[common], help="shuffle or exactly reverse a cut-tree",
                       description="Shuffle a cut-tree. CSV columns: vertex,parent.")
    h.add_argument("--mode", choices=("one", "k", "complete", "reverse-exact"), default="one")
    h.add_argument("--input", required=True, help="cut record or tree JSON, or file")
    h.add_argument("--weights")
    h.add_argument("--target", type=int)
    h.add_argument("--targets")
    h.set_defaults(func=cmd_shuff)

    i = sub.add_parser("icrt", parents=[common], help="continuum trees",
                       description="CSV columns: survival r,survival; line-break "
                                   "vertex,parent,length; genealogy replica,target,L_inf.")
    i.add_argument("action", choices=("line-break", "survival", "genealogy"))
    i.add_argument("--theta", required=True, help="JSON array [theta0, theta1, ...]")
    i.add_argument("-k", type=int, default=1)
    i.add_argument("--r", nargs="+")
    i.add_argument("--r-max", type=float, default=4.0)
    i.add_argument("--points", type=int, default=41)
    i.add_argument("-m", type=int, default=None, help="auxiliary leaves (default 50k)")
    i.add_argument("--horizon", type=float, default=None)
    i.add_argument("--replicas", type=int, default=1)
    i.set_defaults(func=cmd_icrt)

    b = sub.add_parser("build-pn", parents=[common], help="weights approximating a parameter",
                       description="CSV columns: label,p.")
    b.add_argument("--theta", required=True)
    b.add_argument("-n", type=int, required=True)
    b.set_defaults(func=cmd_build_pn)

    v = sub.add_parser("verify", parents=[common], help="run a named check",
                       description="CSV columns: name,statistic,threshold,pass,seed,n_samples.")
    v.add_argument("suite")
    v.add_argument("--scale", type=float, default=1.0,
                   help="replica-count multiplier for smoke runs")
    v.set_defaults(func=cmd_verify)

    k = sub.add_parser("bench", parents=[common], help="compiled vs pure-Python kernels",
                       description="CSV columns: kernel,backend,seconds.")
    k.add_argument("-n", type=int, default=2000)
    k.add_argument("--replicas", type=int, default=20)
    k.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    # common flags may come before or after the command, so defaults are
    # filled in here rather than on the shared actions
    for name, value in COMMON_DEFAULTS.items():
        if not hasattr(args, name):
            setattr(args, name, value)
    args.seed = resolve_seed(args.seed)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
