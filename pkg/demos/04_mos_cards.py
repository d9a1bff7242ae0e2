"""
Human rating cards
==================

Each card shows 5 references of one writer on the left and 10 numbered tests
on the right, half of them forged. Only the key file knows which.
"""
import csv
import tempfile
from pathlib import Path

import numpy as np

from sigucss.mos import format_tally, generate_cards, read_key_csv, tally_responses
from sigucss.synthetic import make_corpus, write_corpus

root = Path(tempfile.mkdtemp(prefix="sigucss_mos_"))
catalog, _ = write_corpus(root / "corpus", make_corpus(n_writers=4, seed=2))
images, key = generate_cards(catalog, n_cards=4, seed=7, outdir=root / "cards")
print("cards:", sorted(p.name for p in (root / "cards").iterdir()))
print("card 0 is", images[0].shape[1], "x", images[0].shape[0], "pixels")

# pretend a volunteer answered: right 80% of the time, one slot left blank
rng = np.random.default_rng(3)
rows = []
for card_id, slot, truth in read_key_csv(root / "cards" / "key.csv"):
    answer = truth if rng.random() < 0.8 else {"T": "F", "F": "T"}[truth]
    rows.append((card_id, slot, "" if (card_id, slot) == (0, 1) else answer))
with open(root / "responses.csv", "w", newline="") as fh:
    w = csv.writer(fh)
    w.writerow(["card_id", "slot", "answer"])
    w.writerows(rows)

print(format_tally(tally_responses(rows, key)))
