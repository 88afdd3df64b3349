"""
Voting five (here: three) noisy readings into one
=================================================

Each model makes different mistakes. Aligning the outputs and taking a
majority per column repairs the errors that only a minority made.
"""

from ocrlab.evaluation import cer, confusion
from ocrlab.voting import align_many, vote

truth = "An example sentence with errors"
readings = [
    "An example senience with erors",
    "A example sentence with erors",
    "An example entence with error",
]

alignment = align_many(readings)
for row in alignment.rows:
    print("".join("-" if u is None else u for u in row))

result = vote(readings)
print("\nvoted:", result.text)
print("tie-broken columns:", result.ties)

for text in readings + [result.text]:
    print(f"CER {cer(text, truth):.3f}  {text}")

# which errors survive across the three readings?
for count, predicted, true in confusion((r, truth) for r in readings).rows(top_k=5):
    print(count, predicted or "_", "->", true or "_")
