"""Point-file parsing and dataset catalogs.

A point file is UTF-8 text with one pen sample per line::

    # optional comments
    3            <- optional point count, cross-checked
    0 0
    1 2 512 90   <- columns past the second (pressure, angles...) are dropped
    3 4

A manifest is a CSV with header ``signer_id,path,label``; ``path`` is
relative to the catalog root and the sample id is the file stem.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np

from .errors import CatalogError, FormatError, InputError, ParseError

GENUINE = "genuine"
FORGERY = "forgery"
LABELS = (GENUINE, FORGERY)


@dataclass(frozen=True)
class OnlineSignature:
    """Ordered pen-tip samples of one signing act."""

    points: np.ndarray
    signer_id: str = ""
    sample_id: str = ""
    label: str = GENUINE

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise FormatError(f"points must have shape (n, 2), got {pts.shape}")
        if len(pts) < 2:
            raise FormatError(f"a signature needs at least 2 points, got {len(pts)}")
        if not np.all(np.isfinite(pts)):
            raise FormatError("signature coordinates must be finite")
        if self.label not in LABELS:
            raise FormatError(f"unknown label {self.label!r}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    def with_points(self, points) -> "OnlineSignature":
        return OnlineSignature(points, self.signer_id, self.sample_id, self.label)


def parse_points_text(text: str, source: str = "<string>", **meta) -> OnlineSignature:
    declared = None
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        cols = line.split()
        if declared is None and not rows and len(cols) == 1:
            try:
                declared = int(cols[0])
            except ValueError:
                raise ParseError(source, lineno, f"bad point count {cols[0]!r}") from None
            if declared < 0:
                raise ParseError(source, lineno, "negative point count")
            continue
        if len(cols) < 2:
            raise ParseError(source, lineno, "expected at least two numeric columns")
        try:
            x, y = float(cols[0]), float(cols[1])
        except ValueError:
            raise ParseError(source, lineno, f"non-numeric coordinate in {line!r}") from None
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ParseError(source, lineno, "non-finite coordinate")
        rows.append((x, y))
    if declared is not None and declared != len(rows):
        raise FormatError(f"{source}: header declares {declared} points, found {len(rows)}")
    if len(rows) < 2:
        raise FormatError(f"{source}: a signature needs at least 2 points, found {len(rows)}")
    return OnlineSignature(np.array(rows, dtype=float), **meta)


def parse_points_file(path, **meta) -> OnlineSignature:
    """Read a point file; ``meta`` fills signer_id/sample_id/label."""
    path = Path(path)
    meta.setdefault("sample_id", path.stem)
    return parse_points_text(path.read_text(encoding="utf-8"), str(path), **meta)


def format_points(sig: OnlineSignature) -> str:
    # repr() of a float round-trips exactly
    lines = [str(len(sig.points))]
    lines += [f"{x!r} {y!r}" for x, y in sig.points.tolist()]
    return "\n".join(lines) + "\n"


def write_points_file(path, sig: OnlineSignature) -> None:
    Path(path).write_text(format_points(sig), encoding="utf-8")


@dataclass(frozen=True)
class SampleRef:
    signer_id: str
    sample_id: str
    label: str
    path: Path

    def load(self) -> OnlineSignature:
        return parse_points_file(self.path, signer_id=self.signer_id,
                                 sample_id=self.sample_id, label=self.label)


@dataclass(frozen=True)
class SignerEntry:
    signer_id: str
    genuine: tuple[SampleRef, ...] = ()
    forgeries: tuple[SampleRef, ...] = ()


@dataclass
class DatasetCatalog:
    signers: list[SignerEntry] = field(default_factory=list)

    def __len__(self):
        return len(self.signers)

    def __iter__(self) -> Iterator[SignerEntry]:
        return iter(self.signers)

    def samples(self) -> Iterator[SampleRef]:
        for s in self.signers:
            yield from s.genuine
            yield from s.forgeries

    def signer(self, signer_id: str) -> SignerEntry:
        for s in self.signers:
            if s.signer_id == signer_id:
                return s
        raise KeyError(signer_id)


def catalog_from_refs(refs) -> DatasetCatalog:
    """Group sample refs by signer in (signer_id, sample_id) order."""
    seen = set()
    by_signer: dict[str, list[SampleRef]] = {}
    for ref in refs:
        key = (ref.signer_id, ref.sample_id)
        if key in seen:
            raise CatalogError(f"duplicate sample {ref.sample_id!r} for signer {ref.signer_id!r}")
        seen.add(key)
        by_signer.setdefault(ref.signer_id, []).append(ref)
    signers = []
    for sid in sorted(by_signer):
        refs_s = sorted(by_signer[sid], key=lambda r: r.sample_id)
        signers.append(SignerEntry(
            sid,
            tuple(r for r in refs_s if r.label == GENUINE),
            tuple(r for r in refs_s if r.label == FORGERY),
        ))
    return DatasetCatalog(signers)


def load_catalog(root, manifest) -> DatasetCatalog:
    root = Path(root)
    manifest = Path(manifest)
    refs = []
    with manifest.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = {"signer_id", "path", "label"} - set(reader.fieldnames or ())
        if reader.fieldnames is not None and missing:
            raise CatalogError(f"{manifest}: manifest lacks columns {sorted(missing)}")
        for lineno, row in enumerate(reader, start=2):
            label = row["label"].strip()
            if label not in LABELS:
                raise CatalogError(f"{manifest}:{lineno}: unknown label {label!r}")
            path = root / row["path"].strip()
            if not path.is_file():
                raise CatalogError(f"{manifest}:{lineno}: missing file {path}")
            ref = SampleRef(row["signer_id"].strip(), path.stem, label, path)
            try:
                ref.load()
            except InputError as exc:
                raise CatalogError(f"{manifest}:{lineno}: unreadable sample: {exc}") from exc
            refs.append(ref)
    return catalog_from_refs(refs)


def write_manifest(path, refs, root=None) -> None:
    root = Path(root) if root is not None else Path(path).parent
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["signer_id", "path", "label"])
        for ref in refs:
            w.writerow([ref.signer_id, Path(ref.path).relative_to(root).as_posix(), ref.label])
