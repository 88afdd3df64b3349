"""Sequence voting over several OCR outputs of the same line.

Sequences are aligned with a recursive longest-common-substring decomposition
and then voted column by column. A column's candidates are the characters of
every row plus the gap (``None``); a gap majority emits nothing. Ties go to
the candidate of the lowest-index input row.

More than two sequences are aligned progressively: each new sequence is
aligned against a profile string holding one representative character per
existing column. This approximates true N-way alignment, and the fold order
is the input order. A sequence identical to an earlier one reuses that row
verbatim, so identical inputs always vote in the same columns.
"""

import csv
from collections import Counter
from dataclasses import dataclass, field
from itertools import zip_longest
from pathlib import Path

from .errors import ConfigurationError, DatasetError

GAP = None


def longest_common_substring(a, b):
    """Return ``(length, start_a, start_b)`` of the first longest common run.

    Ties are broken by the smallest start in ``a``, then in ``b``.
    """
    best = (0, 0, 0)
    prev = [0] * (len(b) + 1)
    for i in range(1, len(a) + 1):
        cur = [0] * (len(b) + 1)
        ai = a[i - 1]
        for j in range(1, len(b) + 1):
            if ai == b[j - 1]:
                n = prev[j - 1] + 1
                cur[j] = n
                if n > best[0]:
                    best = (n, i - n, j - n)
        prev = cur
    return best


@dataclass
class Alignment:
    """Equal-length rows over characters and gaps (``None``)."""

    rows: list

    @property
    def n_columns(self):
        return len(self.rows[0]) if self.rows else 0

    def sequence(self, i):
        return "".join(u for u in self.rows[i] if u is not GAP)

    def positions(self, i):
        """Column -> source index in sequence ``i`` (``None`` on gaps)."""
        out, k = [], 0
        for u in self.rows[i]:
            if u is GAP:
                out.append(None)
            else:
                out.append(k)
                k += 1
        return out


def _align_units(a, b):
    if not a or not b:
        return [(x, y) for x, y in zip_longest(a, b, fillvalue=GAP)]
    n, i, j = longest_common_substring(a, b)
    if n == 0:
        return [(x, y) for x, y in zip_longest(a, b, fillvalue=GAP)]
    return (
        _align_units(a[:i], b[:j])
        + list(zip(a[i : i + n], b[j : j + n]))
        + _align_units(a[i + n :], b[j + n :])
    )


def align_pair(a, b):
    """Align two sequences by anchoring longest common substrings recursively.

    Unmatched remainders that share no character are paired position by
    position, the shorter one padded with gaps at its end.

    >>> al = align_pair("erors", "errors")
    >>> ["".join(u or "-" for u in row) for row in al.rows]
    ['e-rors', 'errors']
    """
    cols = _align_units(list(a), list(b))
    return Alignment([[x for x, _ in cols], [y for _, y in cols]])


def _profile(rows):
    """One representative character per column: majority non-gap, lowest row on ties."""
    out = []
    for col in zip(*rows):
        counts = Counter(u for u in col if u is not GAP)
        top = max(counts.values())
        out.append(next(u for u in col if u is not GAP and counts[u] == top))
    return out


def align_many(sequences):
    """Progressive multi-alignment of ``sequences`` in input order."""
    sequences = [list(s) for s in sequences]
    if not sequences:
        return Alignment([])
    rows = [list(sequences[0])]
    for k in range(1, len(sequences)):
        seq = sequences[k]
        same = next((i for i in range(k) if sequences[i] == seq), None)
        if same is not None:
            rows.append(list(rows[same]))
            continue
        profile = _profile(rows) if rows[0] else []
        pair = _align_units(profile, seq)
        new_rows = [[] for _ in range(len(rows) + 1)]
        c = 0
        for p, u in pair:
            if p is GAP:
                for r in new_rows[:-1]:
                    r.append(GAP)
            else:
                for r, old in zip(new_rows, rows):
                    r.append(old[c])
                c += 1
            new_rows[-1].append(u)
        rows = new_rows
    return Alignment(rows)


@dataclass
class VoteResult:
    text: str
    tallies: list = field(default_factory=list)
    ties: int = 0
    alignment: Alignment = None


def vote(sequences):
    """Majority vote over aligned sequences.

    >>> vote(["An example senience with erors",
    ...       "A example sentence with erors",
    ...       "An example entence with error"]).text
    'An example sentence with erors'
    """
    if not sequences:
        raise ConfigurationError("vote needs at least one sequence")
    al = align_many(sequences)
    out, tallies, ties = [], [], 0
    for col in zip(*al.rows):
        counts = Counter(col)
        top = max(counts.values())
        if sum(1 for v in counts.values() if v == top) > 1:
            ties += 1
        winner = next(u for u in col if counts[u] == top)
        if winner is not GAP:
            out.append(winner)
        tallies.append(dict(counts))
    return VoteResult("".join(out), tallies, ties, al)


def read_lines(path):
    return Path(path).read_text(encoding="utf-8").splitlines()


def vote_files(paths, out=None, tally_csv=None):
    """Vote line ``i`` of every file into line ``i`` of ``out``.

    Returns the per-line ``VoteResult`` list. All inputs must have the same
    number of lines.
    """
    paths = [Path(p) for p in paths]
    if not paths:
        raise DatasetError("vote_files needs at least one input file")
    contents = [read_lines(p) for p in paths]
    expected = len(contents[0])
    for p, lines in zip(paths, contents):
        if len(lines) != expected:
            raise DatasetError(
                f"line count mismatch: {p} has {len(lines)} lines, {paths[0]} has {expected}"
            )
    results = [vote(list(group)) for group in zip(*contents)]
    if out is not None:
        Path(out).write_text("".join(r.text + "\n" for r in results), encoding="utf-8")
    if tally_csv is not None:
        with open(tally_csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["line", "column", "candidate", "count"])
            for li, r in enumerate(results):
                for ci, tally in enumerate(r.tallies):
                    for cand, n in tally.items():
                        w.writerow([li, ci, "_" if cand is GAP else cand, n])
    return results
