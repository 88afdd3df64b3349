"""
A miniature cross-fold experiment
=================================

Synthesize a small corpus, train five folds of Network 1, vote their outputs
on a held-out set and print the results table. The default ``--iter-scale 0.2``
(2000 iterations per fold) takes a few minutes on one core. Sixty degraded
lines are a hard setting for the shallow network; CERs around 50% are normal
here and drop quickly with more lines or iterations.
"""

import argparse
import logging

from ocrlab.synthline import DegradationParams, generate_corpus
from ocrlab.harness import run_experiment

parser = argparse.ArgumentParser()
parser.add_argument("--iter-scale", type=float, default=0.2)
parser.add_argument("--seed", type=int, default=0)
args = parser.parse_args()
logging.basicConfig(level=logging.INFO, format="%(message)s")

samples = generate_corpus(60 + 100, DegradationParams.degraded(args.seed), alphabet="aelnost")
print("first lines:", [s.text for s in samples[:3]])

report = run_experiment(samples, networks=[1], line_counts=[60], seed=args.seed,
                        iter_scale=args.iter_scale, eval_size=100)
print(report.to_text())

for count, predicted, true in report.confusions[(1, 60)].rows(top_k=5):
    print(f"{count:4d}  predicted {predicted or '_'!r:6s} true {true or '_'!r}")
