"""Command-line front end.

Every subcommand reads and writes only the paths given on the command line.
Randomized subcommands (roc, bench, mos-cards) require ``--seed``.
"""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from . import __version__
from .cardfile import load_card, save_card
from .errors import SigUcssError
from .evaluation import (METHODS, run_roc_experiments, run_table1_experiment, score_row,
                         write_eer_csv, write_roc_csv)
from .features import FeatureStore, extract_features
from .imaging import DEFAULT_MAX_STEP, DEFAULT_RADIUS, BinaryImage, render_offline, skeletonize
from .ingest import load_catalog, parse_points_file
from .mos import format_tally, generate_cards, read_key_csv, read_responses_csv, tally_responses
from .pbm import read_pbm, write_pbm
from .ucss import skeleton_segments, write_segments

VERIFY_METHODS = ("all", "baseline", "shape", "length", "fused")


def _add_render_flags(p):
    p.add_argument("--max-step", type=float, default=DEFAULT_MAX_STEP,
                   help="largest spacing (px) between oversampled points")
    p.add_argument("--radius", type=int, default=DEFAULT_RADIUS,
                   help="dilation disk radius (px)")


def _add_catalog_flags(p):
    p.add_argument("--manifest", required=True, type=Path,
                   help="CSV with columns signer_id,path,label")
    p.add_argument("--root", type=Path, default=None,
                   help="directory sample paths are relative to (default: manifest directory)")
    p.add_argument("--seed", type=int, required=True, help="random seed (required)")
    p.add_argument("--workers", type=int, default=1, help="processes for feature extraction")
    _add_render_flags(p)


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(prog="sigucss", formatter_class=fmt,
                                     description="Offline signature verification with skeleton segments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", formatter_class=fmt, help="point file -> dilated offline bitmap (PBM)")
    p.add_argument("--in", dest="inp", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    _add_render_flags(p)

    p = sub.add_parser("skeletonize", formatter_class=fmt, help="bitmap (PBM) -> skeleton (PBM)")
    p.add_argument("--in", dest="inp", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("extract", formatter_class=fmt, help="skeleton (PBM) -> segment dump")
    p.add_argument("--in", dest="inp", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("enroll", formatter_class=fmt, help="reference point files -> enrollment card (JSON)")
    p.add_argument("--refs", nargs="+", required=True, type=Path, help="reference point files (5 in the protocol)")
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--codes-only", action="store_true", help="omit full segments (disables the DTW baseline)")
    _add_render_flags(p)

    p = sub.add_parser("verify", formatter_class=fmt, help="score one point file against a card")
    p.add_argument("--card", required=True, type=Path)
    p.add_argument("--test", required=True, type=Path)
    p.add_argument("--method", choices=VERIFY_METHODS, default="fused",
                   help="'fused' also reports shape and length; 'all' adds the DTW baseline")
    p.add_argument("--signer", default="", help="signer id echoed in the output row")
    p.add_argument("--label", default="unknown", help="label echoed in the output row")

    p = sub.add_parser("roc", formatter_class=fmt, help="ROC protocol (5 refs, 20 genuine + 25 forgery tests)")
    _add_catalog_flags(p)
    p.add_argument("--method", nargs="+", choices=METHODS, default=list(METHODS), help="methods to score")
    p.add_argument("--n-refs", type=int, default=5, help="references per signer")
    p.add_argument("--n-genuine", type=int, default=20, help="genuine tests per signer")
    p.add_argument("--n-forgery", type=int, default=25, help="forgery tests per signer")
    p.add_argument("--out", required=True, type=Path, help="ROC CSV (method,threshold,far,frr)")

    p = sub.add_parser("bench", formatter_class=fmt, help="repeated-trial EER protocol")
    _add_catalog_flags(p)
    p.add_argument("--methods", nargs="+", choices=METHODS, default=list(METHODS), help="methods to score")
    p.add_argument("--trials", type=int, default=50, help="independent random partitions")
    p.add_argument("--n-refs", type=int, default=5, help="references per signer")
    p.add_argument("--n-genuine", type=int, default=5, help="genuine tests per signer")
    p.add_argument("--n-forgery", type=int, default=5, help="forgery tests per signer")
    p.add_argument("--out", required=True, type=Path, help="EER CSV (method,mean_eer,std_eer,n_trials)")

    p = sub.add_parser("mos-cards", formatter_class=fmt, help="generate rating cards and answer key")
    p.add_argument("--manifest", required=True, type=Path)
    p.add_argument("--root", type=Path, default=None,
                   help="directory sample paths are relative to (default: manifest directory)")
    p.add_argument("--n", type=int, required=True, help="number of cards")
    p.add_argument("--seed", type=int, required=True, help="random seed (required)")
    p.add_argument("--outdir", required=True, type=Path, help="directory for card_<id>.pbm and key.csv")
    _add_render_flags(p)

    p = sub.add_parser("mos-tally", formatter_class=fmt, help="tally filled cards into FAR/FRR")
    p.add_argument("--key", required=True, type=Path)
    p.add_argument("--responses", required=True, type=Path)
    return parser


def _catalog(args):
    root = args.root if args.root is not None else args.manifest.parent
    return load_catalog(root, args.manifest)


def _store(args) -> FeatureStore:
    return FeatureStore(args.max_step, args.radius)


def run(args) -> int:
    cmd = args.command
    if cmd == "convert":
        img = render_offline(parse_points_file(args.inp), args.max_step, args.radius)
        write_pbm(args.out, img.pixels)
    elif cmd == "skeletonize":
        write_pbm(args.out, skeletonize(BinaryImage(read_pbm(args.inp))).pixels)
    elif cmd == "extract":
        write_segments(args.out, skeleton_segments(BinaryImage(read_pbm(args.inp))))
    elif cmd == "enroll":
        feats = [extract_features(parse_points_file(p), args.max_step, args.radius) for p in args.refs]
        save_card(args.out, [f.segments for f in feats], [f.sample_id for f in feats],
                  {"max_step": args.max_step, "radius": args.radius},
                  include_segments=not args.codes_only)
    elif cmd == "verify":
        enrollment, params = load_card(args.card)
        sig = parse_points_file(args.test)
        feats = extract_features(sig, params.get("max_step", DEFAULT_MAX_STEP),
                                 params.get("radius", DEFAULT_RADIUS))
        score = enrollment.score(feats.segments, baseline=args.method in ("all", "baseline"))
        if args.method == "baseline":
            score.j_shape = score.j_length = score.j_fused = None
        elif args.method in ("shape", "length"):
            keep = {"shape": "j_shape", "length": "j_length"}[args.method]
            for name in ("j_shape", "j_length", "j_fused"):
                if name != keep:
                    setattr(score, name, None)
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(score_row(args.signer, feats.sample_id, args.label, score))
    elif cmd == "roc":
        curves = run_roc_experiments(_catalog(args), args.method, args.seed, args.n_refs,
                                     args.n_genuine, args.n_forgery, _store(args), args.workers)
        write_roc_csv(args.out, curves)
        for m, c in curves.items():
            print(f"{m}: pooled EER {c.eer:.4f}", file=sys.stderr)
    elif cmd == "bench":
        report = run_table1_experiment(_catalog(args), args.methods, args.trials, args.seed,
                                       args.n_refs, args.n_genuine, args.n_forgery,
                                       _store(args), args.workers)
        write_eer_csv(args.out, report)
    elif cmd == "mos-cards":
        def render(sig):
            return render_offline(sig, args.max_step, args.radius)
        generate_cards(_catalog(args), args.n, args.seed, args.outdir, render=render)
    elif cmd == "mos-tally":
        tally = tally_responses(read_responses_csv(args.responses), read_key_csv(args.key))
        print(format_tally(tally))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except (SigUcssError, OSError, ValueError) as exc:
        print(f"sigucss {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
