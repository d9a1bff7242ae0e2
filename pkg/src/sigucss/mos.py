"""Human-rating (mean opinion score) cards and response tallying.

A card shows five genuine references of one signer on the left and ten
numbered test signatures on the right, five genuine and five forged in a
random order. The truth of each slot only goes to the answer key; the card
image is composed from the bitmaps and slot numbers alone.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import GenerationError, TallyError
from .evaluation import trial_rng
from .imaging import BinaryImage, render_offline
from .pbm import write_pbm

N_REFS = 5
N_TESTS = 10
N_TRUE = 5
HUMAN_FRR = 0.256
HUMAN_FAR = 0.110

CELL_W, CELL_H = 192, 72
GAP = 8
BOX = 20
PANEL_GAP = 24


@dataclass(frozen=True)
class MosCard:
    card_id: int
    signer_id: str
    reference_ids: tuple[str, ...]
    slots: tuple[tuple[str, str], ...]   # (sample_id, "T" | "F"), slot 1 first


@dataclass(frozen=True)
class MosTally:
    n_cards: int
    frr: float
    far: float
    n_genuine: int = 0
    n_forgery: int = 0


def plan_cards(catalog, n_cards: int, seed: int) -> list[MosCard]:
    """Draw card contents; signers are reused round-robin when n_cards exceeds them."""
    signers = list(catalog)
    if not signers:
        raise GenerationError("catalog has no signers")
    cards = []
    for c in range(n_cards):
        s = signers[c % len(signers)]
        if len(s.genuine) < N_REFS + N_TRUE or len(s.forgeries) < N_TESTS - N_TRUE:
            raise GenerationError(
                f"signer {s.signer_id!r} needs {N_REFS + N_TRUE} genuine and "
                f"{N_TESTS - N_TRUE} forgery samples, has {len(s.genuine)} / {len(s.forgeries)}")
        rng = trial_rng(seed, c)
        g = rng.permutation(len(s.genuine))
        f = rng.permutation(len(s.forgeries))[:N_TESTS - N_TRUE]
        refs = tuple(s.genuine[i].sample_id for i in g[:N_REFS])
        tests = [(s.genuine[i].sample_id, "T") for i in g[N_REFS:N_REFS + N_TRUE]]
        tests += [(s.forgeries[i].sample_id, "F") for i in f]
        order = rng.permutation(N_TESTS)
        cards.append(MosCard(c, s.signer_id, refs, tuple(tests[i] for i in order)))
    return cards


# ---------------------------------------------------------------------------
# card images

_DIGITS = {
    "0": ("111", "101", "101", "101", "111"),
    "1": ("010", "110", "010", "010", "111"),
    "2": ("111", "001", "111", "100", "111"),
    "3": ("111", "001", "111", "001", "111"),
    "4": ("101", "101", "111", "001", "001"),
    "5": ("111", "100", "111", "001", "111"),
    "6": ("111", "100", "111", "101", "111"),
    "7": ("111", "001", "010", "010", "010"),
    "8": ("111", "101", "111", "101", "111"),
    "9": ("111", "101", "111", "001", "111"),
}


def render_number(n: int, zoom: int = 3) -> np.ndarray:
    glyphs = [np.array([[c == "1" for c in row] for row in _DIGITS[d]]) for d in str(n)]
    spaced = []
    for g in glyphs:
        spaced += [g, np.zeros((5, 1), dtype=bool)]
    text = np.hstack(spaced[:-1])
    return np.kron(text, np.ones((zoom, zoom), dtype=bool))


def fit(pixels: np.ndarray, width: int, height: int) -> np.ndarray:
    """Shrink by block-max pooling until it fits, then center on a blank cell."""
    px = np.asarray(pixels, dtype=bool)
    rows = np.flatnonzero(px.any(axis=1))
    cols = np.flatnonzero(px.any(axis=0))
    out = np.zeros((height, width), dtype=bool)
    if rows.size == 0:
        return out
    px = px[rows[0]:rows[-1] + 1, cols[0]:cols[-1] + 1]
    k = max(1, int(np.ceil(max(px.shape[0] / height, px.shape[1] / width))))
    if k > 1:
        h, w = -(-px.shape[0] // k) * k, -(-px.shape[1] // k) * k
        padded = np.zeros((h, w), dtype=bool)
        padded[:px.shape[0], :px.shape[1]] = px
        px = padded.reshape(h // k, k, w // k, k).any(axis=(1, 3))
    r0 = (height - px.shape[0]) // 2
    c0 = (width - px.shape[1]) // 2
    out[r0:r0 + px.shape[0], c0:c0 + px.shape[1]] = px
    return out


def _answer_box(size: int) -> np.ndarray:
    box = np.zeros((size, size), dtype=bool)
    box[[0, -1], :] = True
    box[:, [0, -1]] = True
    return box


def compose_card(ref_bitmaps, test_bitmaps) -> np.ndarray:
    """Two-panel card: references left, numbered tests with empty answer boxes right."""
    ref_bitmaps, test_bitmaps = list(ref_bitmaps), list(test_bitmaps)
    label_w = 3 * 3 * 2 + 3 + GAP
    right_w = label_w + CELL_W + GAP + BOX
    row_h = CELL_H + GAP
    height = GAP + len(test_bitmaps) * row_h
    ref_h = (height - GAP) // max(1, len(ref_bitmaps)) - GAP
    left_w = CELL_W
    card = np.zeros((height, GAP + left_w + PANEL_GAP + right_w + GAP), dtype=bool)
    for i, bmp in enumerate(ref_bitmaps):
        top = GAP + i * (ref_h + GAP)
        card[top:top + ref_h, GAP:GAP + left_w] = fit(bmp, left_w, ref_h)
    sep = GAP + left_w + PANEL_GAP // 2
    card[:, sep] = True
    x0 = GAP + left_w + PANEL_GAP
    for i, bmp in enumerate(test_bitmaps):
        top = GAP + i * row_h
        num = render_number(i + 1)
        nr = top + (CELL_H - num.shape[0]) // 2
        card[nr:nr + num.shape[0], x0:x0 + num.shape[1]] = num
        card[top:top + CELL_H, x0 + label_w:x0 + label_w + CELL_W] = fit(bmp, CELL_W, CELL_H)
        br = top + (CELL_H - BOX) // 2
        bc = x0 + label_w + CELL_W + GAP
        card[br:br + BOX, bc:bc + BOX] = _answer_box(BOX)
    return card


def _bitmap_lookup(catalog, render):
    refs = {(r.signer_id, r.sample_id): r for r in catalog.samples()}

    def get(signer_id, sample_id) -> np.ndarray:
        img = render(refs[(signer_id, sample_id)].load())
        return img.pixels if isinstance(img, BinaryImage) else img
    return get


def generate_cards(catalog, n_cards: int, seed: int, outdir=None, render=render_offline):
    """Plan and draw ``n_cards`` cards.

    Returns ``(images, key)`` where ``images`` maps card id to a boolean raster
    and ``key`` is a list of ``(card_id, slot, truth)`` rows. With ``outdir``
    the cards are written as ``card_<id>.pbm`` next to ``key.csv``.
    """
    cards = plan_cards(catalog, n_cards, seed)
    bitmap = _bitmap_lookup(catalog, render)
    images = {}
    for card in cards:
        images[card.card_id] = compose_card(
            [bitmap(card.signer_id, s) for s in card.reference_ids],
            [bitmap(card.signer_id, s) for s, _ in card.slots])
    key = [(card.card_id, slot, truth)
           for card in cards for slot, (_, truth) in enumerate(card.slots, start=1)]
    if outdir is not None:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        for cid, img in images.items():
            write_pbm(outdir / f"card_{cid}.pbm", img)
        write_key_csv(outdir / "key.csv", key)
    return images, key


# ---------------------------------------------------------------------------
# key / responses

def write_key_csv(path, key) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["card_id", "slot", "truth"])
        w.writerows(key)


def _read_rows(path, value_col):
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"card_id", "slot", value_col} <= set(reader.fieldnames):
            raise TallyError(f"{path}: expected header card_id,slot,{value_col}")
        return [(int(r["card_id"]), int(r["slot"]), (r[value_col] or "").strip().upper())
                for r in reader]


def read_key_csv(path):
    return _read_rows(path, "truth")


def read_responses_csv(path):
    return _read_rows(path, "answer")


def tally_responses(responses, key) -> MosTally:
    """FRR over genuine slots and FAR over forged slots; blank answers are skipped."""
    truth = {}
    for card_id, slot, t in key:
        if t not in ("T", "F"):
            raise TallyError(f"key entry ({card_id}, {slot}) has truth {t!r}")
        truth[(int(card_id), int(slot))] = t
    counts = {"TT": 0, "TF": 0, "FT": 0, "FF": 0}
    cards = set()
    for card_id, slot, answer in responses:
        k = (int(card_id), int(slot))
        if k not in truth:
            raise TallyError(f"response for unknown card/slot {k}")
        answer = (answer or "").strip().upper()
        if not answer:
            continue
        if answer not in ("T", "F"):
            raise TallyError(f"answer {answer!r} for {k} is neither T nor F")
        counts[truth[k] + answer] += 1
        cards.add(k[0])
    n_gen = counts["TT"] + counts["TF"]
    n_forg = counts["FT"] + counts["FF"]
    frr = counts["TF"] / n_gen if n_gen else 0.0
    far = counts["FT"] / n_forg if n_forg else 0.0
    return MosTally(len(cards), frr, far, n_gen, n_forg)


def format_tally(tally: MosTally) -> str:
    return "\n".join([
        "source,n_cards,frr,far",
        f"responses,{tally.n_cards},{tally.frr:.4f},{tally.far:.4f}",
        f"human_reference,239,{HUMAN_FRR:.4f},{HUMAN_FAR:.4f}",
    ])
