"""Per-signature feature extraction shared by enrollment, scoring and evaluation."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .encoding import SegmentCode, subsample4
from .imaging import (DEFAULT_MAX_STEP, DEFAULT_RADIUS, BinaryImage, render_offline,
                      skeletonize)
from .ingest import OnlineSignature, SampleRef
from .projection import ProjectionProfile, vertical_profile
from .ucss import Ucss, skeleton_segments


@dataclass(frozen=True)
class SignatureFeatures:
    signer_id: str
    sample_id: str
    label: str
    offline: BinaryImage
    skeleton: BinaryImage
    segments: tuple[Ucss, ...]
    codes: tuple[SegmentCode, ...]
    profile: ProjectionProfile


def extract_features(sig: OnlineSignature, max_step: float = DEFAULT_MAX_STEP,
                     radius: int = DEFAULT_RADIUS) -> SignatureFeatures:
    offline = render_offline(sig, max_step, radius)
    skel = skeletonize(offline)
    segs = tuple(skeleton_segments(skel))
    return SignatureFeatures(sig.signer_id, sig.sample_id, sig.label, offline, skel, segs,
                             tuple(subsample4(s) for s in segs), vertical_profile(offline))


def _extract_ref(args):
    ref, max_step, radius = args
    return extract_features(ref.load(), max_step, radius)


class FeatureStore:
    """Memoizes features per sample; sources are catalog refs or in-memory signatures."""

    def __init__(self, max_step: float = DEFAULT_MAX_STEP, radius: int = DEFAULT_RADIUS):
        self.max_step = max_step
        self.radius = radius
        self._cache: dict[tuple[str, str], SignatureFeatures] = {}

    def __len__(self):
        return len(self._cache)

    @staticmethod
    def _key(src) -> tuple[str, str]:
        return (src.signer_id, src.sample_id)

    def get(self, src) -> SignatureFeatures:
        key = self._key(src)
        feats = self._cache.get(key)
        if feats is None:
            sig = src.load() if isinstance(src, SampleRef) else src
            feats = extract_features(sig, self.max_step, self.radius)
            self._cache[key] = feats
        return feats

    def prefetch(self, sources, workers: int = 1) -> None:
        todo = [s for s in sources if self._key(s) not in self._cache]
        if workers <= 1 or len(todo) < 2:
            for s in todo:
                self.get(s)
            return
        sigs = [s if isinstance(s, SampleRef) else None for s in todo]
        refs = [s for s in sigs if s is not None]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = pool.map(_extract_ref, [(r, self.max_step, self.radius) for r in refs],
                               chunksize=8)
            for r, feats in zip(refs, results):
                self._cache[self._key(r)] = feats
        for s in todo:
            self.get(s)
