"""Command line front end: ``ocrlab <subcommand> ...``.

Errors print one line ``error: <kind>: <message>`` to stderr and exit with 2.
"""

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from .errors import ConfigurationError, OcrLabError
from .evaluation import AVERAGING_NOTE, cer, confusion, corpus_cer
from .harness import (
    TrainConfig,
    load_model,
    predict,
    preset_iterations,
    run_experiment,
    save_model,
    save_prob_matrices,
    time_report,
    timing_csv,
    train_fold,
)
from .synthline import (
    DegradationParams,
    build_codec,
    generate_corpus,
    load_dataset,
    split_dataset,
)
from .voting import read_lines, vote_files


def _ints(text):
    return [int(x) for x in text.split(",") if x]


def _load_split(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def cmd_synth(args):
    params = DegradationParams.degraded(args.seed) if args.degrade else DegradationParams(seed=args.seed)
    samples = generate_corpus(args.lines, params, alphabet=args.alphabet, out_dir=args.out)
    print(f"wrote {len(samples)} lines to {args.out}")


def cmd_split(args):
    samples = load_dataset(args.data)
    split, eval_idx = split_dataset(samples, args.lines, args.eval_size, k=args.folds, seed=args.seed)
    doc = {"seed": args.seed, "train_size": args.lines, "eval": eval_idx, "folds": split.folds}
    Path(args.out).write_text(json.dumps(doc) + "\n", encoding="utf-8")
    print(f"{len(split.folds)} folds of sizes {[len(f) for f in split.folds]}, eval {len(eval_idx)}")


def cmd_train(args):
    from .synthline import FoldSplit

    samples = load_dataset(args.data)
    doc = _load_split(args.split)
    split = FoldSplit(doc["folds"])
    codec = build_codec([samples[i].text for i in split.all_indices()])
    if args.iterations is not None:
        budget = args.iterations
    else:
        budget = preset_iterations(doc["train_size"], args.iter_scale)
    folds = range(split.k) if args.fold is None else [args.fold]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for f in folds:
        config = TrainConfig(network_id=args.network, iterations=budget, seed=args.seed + f,
                             validation_interval=args.validation_interval)
        model = train_fold(config, [samples[i] for i in split.train_indices(f)],
                           [samples[i] for i in split.validation_indices(f)], codec)
        path = out / f"net{args.network}_fold{f + 1}.ocrl"
        save_model(model, path)
        print(f"fold {f + 1}: best validation CER {model.best_cer:.4f} at iteration "
              f"{model.best_iteration}, skipped {len(model.skipped)} -> {path}")


def _select_lines(args):
    samples = load_dataset(args.data)
    if args.split:
        samples = [samples[i] for i in _load_split(args.split)["eval"]]
    return samples


def cmd_predict(args):
    lines = _select_lines(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for path in args.model:
        model = load_model(path)
        texts, probs = predict(model, lines, batch_hint=args.batch, workers=args.workers,
                               return_probs=True)
        stem = Path(path).stem
        (out / f"{stem}.txt").write_text("".join(t + "\n" for t in texts), encoding="utf-8")
        if args.dump_probs:
            save_prob_matrices(out / f"{stem}.probs.npz", probs)
        print(f"{stem}: {len(texts)} lines -> {out / (stem + '.txt')}")
    if args.gt_out:
        Path(args.gt_out).write_text("".join(s.text + "\n" for s in lines), encoding="utf-8")


def cmd_vote(args):
    results = vote_files(args.inputs, out=args.out, tally_csv=args.tally)
    ties = sum(r.ties for r in results)
    print(f"voted {len(results)} lines from {len(args.inputs)} inputs, {ties} tie-broken columns")


def cmd_eval(args):
    pred = read_lines(args.pred)
    truth = read_lines(args.gt)
    if len(pred) != len(truth):
        raise ConfigurationError(f"{args.pred} has {len(pred)} lines, {args.gt} has {len(truth)}")
    pairs = list(zip(pred, truth))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "cer.csv", "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# {AVERAGING_NOTE}\n")
        w = csv.writer(fh)
        w.writerow(["line", "cer"])
        for i, (p, t) in enumerate(pairs):
            w.writerow([i, f"{cer(p, t):.6f}" if t else ""])
        w.writerow(["corpus", f"{corpus_cer(pairs):.6f}"])
    confusion(pairs).to_csv(out / "confusion.csv", top_k=args.top)
    print(f"corpus CER {corpus_cer(pairs):.6f} over {len(pairs)} lines")


def cmd_experiment(args):
    if args.data:
        samples = load_dataset(args.data)
        corpus = Path(args.data).name
    else:
        params = DegradationParams.degraded(args.seed) if args.degrade else DegradationParams(seed=args.seed)
        samples = generate_corpus(max(_ints(args.lines)) + args.eval_size, params,
                                  alphabet=args.alphabet)
        corpus = "synthetic"
    report = run_experiment(samples, _ints(args.network), _ints(args.lines), seed=args.seed,
                            iter_scale=args.iter_scale, eval_size=args.eval_size,
                            workers=args.workers, corpus=corpus)
    report.write(args.out)
    print(report.to_text(), end="")


def cmd_time(args):
    lines = load_dataset(args.data)[: args.count]
    models = {}
    for path in args.model:
        m = load_model(path)
        models.setdefault(m.spec.network_id, []).append(m)
    rows = time_report(models, lines, worker_counts=_ints(args.workers))
    text = timing_csv(rows)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    print(text, end="")


def build_parser():
    p = argparse.ArgumentParser(prog="ocrlab", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="generate a synthetic line dataset")
    s.add_argument("--lines", type=int, required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--alphabet", default=None, help="restrict words to these letters")
    s.add_argument("--degrade", action="store_true", help="enable the degraded preset")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("split", help="write evaluation set and folds as JSON")
    s.add_argument("--data", required=True)
    s.add_argument("--lines", type=int, required=True, help="training-set size")
    s.add_argument("--eval-size", type=int, default=200)
    s.add_argument("--folds", type=int, default=5)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_split)

    s = sub.add_parser("train", help="train fold models")
    s.add_argument("--data", required=True)
    s.add_argument("--split", required=True)
    s.add_argument("--network", type=int, choices=range(1, 8), default=1)
    s.add_argument("--fold", type=int, default=None, help="0-based fold; default all")
    s.add_argument("--iter-scale", type=float, default=1.0)
    s.add_argument("--iterations", type=int, default=None)
    s.add_argument("--validation-interval", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("predict", help="decode lines with one or more models")
    s.add_argument("--model", nargs="+", required=True)
    s.add_argument("--data", required=True)
    s.add_argument("--split", default=None, help="predict only the split's evaluation set")
    s.add_argument("--batch", type=int, default=20)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--dump-probs", action="store_true")
    s.add_argument("--gt-out", default=None, help="also write the ground truth lines here")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_predict)

    s = sub.add_parser("vote", help="sequence-vote text files line by line")
    s.add_argument("inputs", nargs="+")
    s.add_argument("--out", required=True)
    s.add_argument("--tally", default=None, help="per-column tally CSV")
    s.set_defaults(func=cmd_vote)

    s = sub.add_parser("eval", help="CER and confusion table of predictions")
    s.add_argument("--pred", required=True)
    s.add_argument("--gt", required=True)
    s.add_argument("--top", type=int, default=10)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("experiment", help="full networks x line-counts matrix with voting")
    s.add_argument("--data", default=None, help="dataset directory; default: synthesize")
    s.add_argument("--network", default="1,7")
    s.add_argument("--lines", default="60,250")
    s.add_argument("--eval-size", type=int, default=200)
    s.add_argument("--iter-scale", type=float, default=1.0)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--alphabet", default=None)
    s.add_argument("--degrade", action="store_true")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_experiment)

    s = sub.add_parser("time", help="training and 5-fold prediction timings")
    s.add_argument("--model", nargs="+", required=True)
    s.add_argument("--data", required=True)
    s.add_argument("--count", type=int, default=20, help="lines to time")
    s.add_argument("--workers", default="1,2,4,8")
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_time)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except OcrLabError as e:
        print(f"error: {e.kind}: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: io: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
