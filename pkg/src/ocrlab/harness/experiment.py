"""Experiment matrix: networks x training-set sizes x folds, plus voting."""

import csv
import io
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..evaluation import AVERAGING_NOTE, confusion, corpus_cer, relative_improvement
from ..synthline import build_codec, split_dataset
from ..voting import vote
from .training import TrainConfig, cross_fold_train, predict, preset_iterations

log = logging.getLogger(__name__)


@dataclass
class ExperimentReport:
    corpus: str
    seed: int
    iter_scale: float
    eval_size: int
    cells: list = field(default_factory=list)
    voted: dict = field(default_factory=dict)
    confusions: dict = field(default_factory=dict)
    models: dict = field(default_factory=dict, repr=False)

    @property
    def networks(self):
        return sorted({c["network"] for c in self.cells})

    @property
    def line_counts(self):
        return sorted({c["lines"] for c in self.cells})

    def fold_cers(self, network, lines):
        rows = [c for c in self.cells if c["network"] == network and c["lines"] == lines]
        return [c["cer"] for c in sorted(rows, key=lambda c: c["fold"])]

    def fold_average(self, network, lines):
        return float(np.mean(self.fold_cers(network, lines)))

    def improvements(self, network, lines, baseline=1):
        """Relative improvement (percent) over ``baseline`` for fold averages and voting."""
        if network == baseline or baseline not in self.networks:
            return None, None
        base_avg = self.fold_average(baseline, lines)
        base_voted = self.voted[(baseline, lines)]
        avg = relative_improvement(base_avg, self.fold_average(network, lines)) if base_avg > 0 else None
        voted = relative_improvement(base_voted, self.voted[(network, lines)]) if base_voted > 0 else None
        return avg, voted

    def header_lines(self):
        return [
            f"corpus: {self.corpus}",
            f"seed: {self.seed}",
            f"iter_scale: {self.iter_scale}",
            f"evaluation set: {self.eval_size} lines",
            AVERAGING_NOTE,
        ]

    def cells_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["corpus", "network", "lines", "fold", "cer", "best_iteration",
                    "skipped", "weight_hash"])
        for c in self.cells:
            w.writerow([self.corpus, c["network"], c["lines"], c["fold"], repr(c["cer"]),
                        c["best_iteration"], c["skipped"], c["weight_hash"]])
        return buf.getvalue()

    def _table_rows(self):
        for lines in self.line_counts:
            for net in self.networks:
                folds = self.fold_cers(net, lines)
                imp_avg, imp_voted = self.improvements(net, lines)
                yield lines, net, folds, self.fold_average(net, lines), imp_avg, \
                    self.voted[(net, lines)], imp_voted

    def table_csv(self):
        """Per-fold CERs, fold average, voted CER and improvements, in percent."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        k = max((len(self.fold_cers(n, l)) for n in self.networks for l in self.line_counts), default=0)
        w.writerow(["lines", "network"] + [f"fold{i + 1}" for i in range(k)]
                   + ["avg_cer", "avg_imp", "voted_cer", "voted_imp"])
        fmt = lambda x: "" if x is None else f"{x:.2f}"
        for lines, net, folds, avg, imp_avg, voted, imp_voted in self._table_rows():
            w.writerow([lines, net] + [fmt(100 * c) for c in folds]
                       + [fmt(100 * avg), fmt(imp_avg), fmt(100 * voted), fmt(imp_voted)])
        return buf.getvalue()

    def figure_csv(self):
        """Average and voted CER per network and training-set size (percent)."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["network", "lines", "avg_cer", "voted_cer"])
        for net in self.networks:
            for lines in self.line_counts:
                w.writerow([net, lines, f"{100 * self.fold_average(net, lines):.4f}",
                            f"{100 * self.voted[(net, lines)]:.4f}"])
        return buf.getvalue()

    def to_text(self):
        out = [f"# {h}" for h in self.header_lines()]
        fmt = lambda x: "" if x is None else f"{x:.2f}"
        for lines in self.line_counts:
            out.append("")
            out.append(f"{lines} Lines")
            k = len(self.fold_cers(self.networks[0], lines))
            head = ["Network"] + [str(i + 1) for i in range(k)] + ["Avg", "Imp", "Voted", "Imp"]
            rows = [head]
            for ln, net, folds, avg, imp_avg, voted, imp_voted in self._table_rows():
                if ln != lines:
                    continue
                rows.append([f"Network {net}"] + [fmt(100 * c) for c in folds]
                            + [fmt(100 * avg), fmt(imp_avg), fmt(100 * voted), fmt(imp_voted)])
            widths = [max(len(r[i]) for r in rows) for i in range(len(head))]
            for r in rows:
                out.append("  ".join(c.rjust(wd) for c, wd in zip(r, widths)).rstrip())
        return "\n".join(out) + "\n"

    def write(self, out_dir):
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        header = "".join(f"# {h}\n" for h in self.header_lines())
        (out / "cells.csv").write_text(header + self.cells_csv(), encoding="utf-8")
        (out / "table.csv").write_text(header + self.table_csv(), encoding="utf-8")
        (out / "figure.csv").write_text(header + self.figure_csv(), encoding="utf-8")
        (out / "table.txt").write_text(self.to_text(), encoding="utf-8")
        for (net, lines), table in sorted(self.confusions.items()):
            table.to_csv(out / f"confusion_net{net}_lines{lines}.csv", top_k=10)

    def to_bytes(self):
        """Canonical byte form of the whole report, used for reproducibility checks."""
        parts = [self.cells_csv(), self.table_csv(), self.figure_csv(), self.to_text()]
        for key, table in sorted(self.confusions.items()):
            parts.append(f"{key}: {table.rows()!r}\n")
        return "".join(parts).encode("utf-8")


def run_experiment(samples, networks, line_counts, seed=0, iter_scale=1.0, eval_size=200,
                   workers=1, corpus="synthetic", iterations=None, validation_interval=1000,
                   network_scale=1.0, keep_models=False):
    """Cross-fold train every (network, training-set size), predict the held-out set, vote.

    One shuffle (from ``seed``) fixes the evaluation set for all sizes. The
    iteration budget follows the preset schedule times ``iter_scale`` unless
    ``iterations`` overrides it.
    """
    report = ExperimentReport(corpus, seed, iter_scale, eval_size)
    for lines in sorted(line_counts):
        split, eval_idx = split_dataset(samples, lines, eval_size, seed=seed)
        train_samples = [samples[i] for i in split.all_indices()]
        codec = build_codec([s.text for s in train_samples])
        eval_lines = [samples[i] for i in eval_idx]
        truths = [s.text for s in eval_lines]
        budget = iterations if iterations is not None else preset_iterations(lines, iter_scale)
        for net in sorted(networks):
            config = TrainConfig(network_id=net, iterations=budget, seed=seed,
                                 validation_interval=validation_interval,
                                 network_scale=network_scale)
            log.info("training network %d on %d lines, %d iterations x %d folds",
                     net, lines, budget, split.k)
            models = cross_fold_train(config, split, samples, codec, workers=workers)
            fold_texts = []
            for f, model in enumerate(models):
                texts = predict(model, eval_lines, workers=workers)
                fold_texts.append(texts)
                report.cells.append({
                    "network": net, "lines": lines, "fold": f + 1,
                    "cer": corpus_cer(zip(texts, truths)),
                    "best_iteration": model.best_iteration,
                    "skipped": len(model.skipped),
                    "weight_hash": model.weight_hash()[:16],
                })
            voted = [vote(list(group)).text for group in zip(*fold_texts)]
            report.voted[(net, lines)] = corpus_cer(zip(voted, truths))
            report.confusions[(net, lines)] = confusion(zip(voted, truths))
            if keep_models:
                report.models[(net, lines)] = models
    return report
