"""Enrollment card persistence (JSON).

Layout::

    {"format": "sigucss-enrollment", "version": 1,
     "params": {"max_step": 0.5, "radius": 2},
     "references": [
        {"index": 0, "sample_id": "...",
         "codes": [[x1, y1, x2, y2, x3, y3, x4, y4, L], ...],
         "segments": [[[x, y], ...], ...]},      # optional
        ...]}

``codes`` alone suffice for the shape, length and fused scores; the DTW
baseline also needs ``segments``.
"""
from __future__ import annotations

import json
from pathlib import Path

from .encoding import SegmentCode
from .errors import EnrollmentError
from .scoring import Enrollment
from .ucss import Ucss

FORMAT = "sigucss-enrollment"
VERSION = 1


def card_dict(ref_segments, sample_ids=None, params=None, include_segments: bool = True) -> dict:
    refs = []
    for i, segs in enumerate(ref_segments):
        entry = {"index": i}
        if sample_ids is not None:
            entry["sample_id"] = sample_ids[i]
        entry["codes"] = [s.code.to_record() for s in segs]
        if include_segments:
            entry["segments"] = [s.points.tolist() for s in segs]
        refs.append(entry)
    return {"format": FORMAT, "version": VERSION, "params": dict(params or {}), "references": refs}


def save_card(path, ref_segments, sample_ids=None, params=None, include_segments: bool = True) -> None:
    data = card_dict(ref_segments, sample_ids, params, include_segments)
    Path(path).write_text(json.dumps(data, indent=1) + "\n", encoding="utf-8")


def enrollment_from_dict(data: dict) -> Enrollment:
    if data.get("format") != FORMAT:
        raise EnrollmentError(f"not an enrollment card (format={data.get('format')!r})")
    refs = []
    for entry in sorted(data["references"], key=lambda e: e["index"]):
        codes = [SegmentCode.from_record(r) for r in entry["codes"]]
        if "segments" in entry:
            segs = [Ucss(p) for p in entry["segments"]]
            if len(segs) != len(codes):
                raise EnrollmentError(f"reference {entry['index']}: {len(segs)} segments but {len(codes)} codes")
            refs.append(segs)
        else:
            refs.append(codes)
    return Enrollment(refs)


def load_card(path) -> tuple[Enrollment, dict]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return enrollment_from_dict(data), data.get("params", {})
