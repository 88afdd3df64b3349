"""
Two ways to read a CTC path
===========================

A two-frame, two-class toy where every cell has probability 0.5. We list the
four possible paths, see which ones spell "a" or "aa" under each collapse
rule, and check that the forward-backward loss agrees with the enumeration.
"""

import itertools
import math

import numpy as np

from ocrlab.ctc import collapse, ctc_brute_force, ctc_loss
from ocrlab.errors import CtcLengthError

probs = np.full((2, 2), 0.5)
names = {0: "_", 1: "a"}

print("path   merge  no-merge")
for path in itertools.product((0, 1), repeat=2):
    shown = "".join(names[k] for k in path)
    merged = "".join(names[k] for k in collapse(path, True))
    kept = "".join(names[k] for k in collapse(path, False))
    print(f"{shown:6s} {merged or '(empty)':8s}{kept or '(empty)'}")

# "a" under the standard rule: _a, a_ and aa all collapse to it
loss, _ = ctc_loss(probs, [1], merge_repeated=True)
print("\nP('a' | merge)    =", math.exp(-loss), "brute force:", ctc_brute_force(probs, [1], True))

# "aa" needs a blank between the letters when repeats merge, so two frames are too few
try:
    ctc_loss(probs, [1, 1], merge_repeated=True)
except CtcLengthError as e:
    print("P('aa' | merge)   -> refused:", e)

loss, grad = ctc_loss(probs, [1, 1], merge_repeated=False)
print("P('aa' | no-merge) =", math.exp(-loss))

# the returned gradient is with respect to the logits behind ``probs``
print("\ngradient wrt logits:\n", grad)
