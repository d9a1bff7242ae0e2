"""Verification protocols, ROC sweeps and equal error rates.

Scores are distances: a test is accepted iff ``score < threshold``. So
``FAR(t)`` is the fraction of forgery scores below ``t`` and ``FRR(t)`` the
fraction of genuine scores at or above ``t``. Scores of all signers are
pooled before any threshold is applied.

Random draws come from numpy's PCG64 seeded with ``SeedSequence([seed, trial])``;
signers consume the trial stream in catalog order.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ProtocolError, ScoringError
from .features import FeatureStore
from .ingest import DatasetCatalog
from .projection import ProjectionEnrollment
from .scoring import DTW, Enrollment

BASELINE = "baseline"
METHOD2 = "method2"
LENGTH = "length"
SHAPE = "shape"
FUSED = "fused"
METHODS = (BASELINE, METHOD2, LENGTH, SHAPE, FUSED)


@dataclass
class RocCurve:
    thresholds: np.ndarray
    far: np.ndarray
    frr: np.ndarray
    genuine: np.ndarray = field(default_factory=lambda: np.zeros(0))
    forgery: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def points(self) -> list[tuple[float, float, float]]:
        return list(zip(self.thresholds.tolist(), self.far.tolist(), self.frr.tolist()))

    @property
    def eer(self) -> float:
        return compute_eer(self.genuine, self.forgery)


def _check_scores(genuine, forgery):
    g = np.asarray(genuine, dtype=float).reshape(-1)
    f = np.asarray(forgery, dtype=float).reshape(-1)
    if g.size == 0 or f.size == 0:
        raise ScoringError("need at least one genuine and one forgery score")
    return g, f


def rates_at(genuine, forgery, thresholds) -> tuple[np.ndarray, np.ndarray]:
    g, f = _check_scores(genuine, forgery)
    t = np.asarray(thresholds, dtype=float)
    far = np.searchsorted(np.sort(f), t, side="left") / f.size
    frr = 1.0 - np.searchsorted(np.sort(g), t, side="left") / g.size
    return far, frr


def roc_curve(genuine, forgery) -> RocCurve:
    """FAR/FRR at every distinct score and at +inf (accept everything)."""
    g, f = _check_scores(genuine, forgery)
    thresholds = np.append(np.unique(np.concatenate([g, f])), np.inf)
    far, frr = rates_at(g, f, thresholds)
    return RocCurve(thresholds, far, frr, g, f)


def compute_eer(genuine, forgery) -> float:
    """Equal error rate from the empirical FAR/FRR sweep.

    If FAR == FRR at some threshold that common value is returned. Otherwise
    the crossing lies between two adjacent sweep points and the straight
    segment joining them in (FAR, FRR) space is intersected with FAR == FRR.
    """
    roc = roc_curve(genuine, forgery)
    diff = roc.far - roc.frr        # goes from -1 to +1, non-decreasing
    touch = np.flatnonzero(diff == 0)
    if touch.size:
        return float(np.mean(roc.far[touch]))
    k = int(np.flatnonzero(diff < 0)[-1])
    a_far, a_frr = roc.far[k], roc.frr[k]
    b_far, b_frr = roc.far[k + 1], roc.frr[k + 1]
    alpha = (a_frr - a_far) / ((a_frr - a_far) + (b_far - b_frr))
    return float(a_far + alpha * (b_far - a_far))


# ---------------------------------------------------------------------------
# protocols

@dataclass(frozen=True)
class TrialSpec:
    seed: int
    n_refs: int = 5
    n_genuine_tests: int = 5
    n_forgery_tests: int = 5
    methods: tuple[str, ...] = METHODS


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, trial])))


def _draw(catalog: DatasetCatalog, rng, n_refs, n_gen, n_forg):
    if len(catalog) == 0:
        raise ProtocolError("catalog has no signers")
    draws = []
    for s in catalog:
        if len(s.genuine) < n_refs + n_gen or len(s.forgeries) < n_forg:
            raise ProtocolError(
                f"signer {s.signer_id!r} has {len(s.genuine)} genuine / {len(s.forgeries)} forgery "
                f"samples; protocol needs {n_refs + n_gen} / {n_forg}")
        perm = rng.permutation(len(s.genuine))
        fperm = rng.permutation(len(s.forgeries))
        draws.append((
            [s.genuine[i] for i in perm[:n_refs]],
            [s.genuine[i] for i in perm[n_refs:n_refs + n_gen]],
            [s.forgeries[i] for i in fperm[:n_forg]],
        ))
    return draws


class SignerModel:
    """All five scorers enrolled on one signer's references."""

    def __init__(self, ref_feats):
        self.ref_feats = list(ref_feats)
        self.enrollment = Enrollment([f.segments for f in self.ref_feats])
        self._projection = None

    @property
    def projection(self) -> ProjectionEnrollment:
        if self._projection is None:
            self._projection = ProjectionEnrollment([f.profile for f in self.ref_feats])
        return self._projection

    def score(self, feats, method: str) -> float:
        if method == SHAPE:
            return self.enrollment.score_j(feats.segments)
        if method == LENGTH:
            return self.enrollment.score_length(feats.segments)
        if method == FUSED:
            return self.enrollment.score_fused(feats.segments)
        if method == BASELINE:
            return self.enrollment.score_j(feats.segments, DTW)
        if method == METHOD2:
            return self.projection.score(feats.profile)
        raise ValueError(f"unknown method {method!r}")


def _check_methods(methods):
    methods = tuple(methods)
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}; choose from {METHODS}")
    return methods


def score_trial(catalog, store: FeatureStore, rng, methods, n_refs, n_gen, n_forg):
    """Pooled genuine and forgery scores per method for one random partition."""
    genuine = {m: [] for m in methods}
    forgery = {m: [] for m in methods}
    for refs, gens, forgs in _draw(catalog, rng, n_refs, n_gen, n_forg):
        model = SignerModel(store.get(r) for r in refs)
        for m in methods:
            genuine[m].extend(model.score(store.get(t), m) for t in gens)
            forgery[m].extend(model.score(store.get(t), m) for t in forgs)
    return ({m: np.array(v) for m, v in genuine.items()},
            {m: np.array(v) for m, v in forgery.items()})


def run_roc_experiments(catalog, methods=METHODS, seed: int = 0, n_refs: int = 5,
                        n_genuine: int = 20, n_forgery: int = 25,
                        store: FeatureStore | None = None, workers: int = 1) -> dict[str, RocCurve]:
    methods = _check_methods(methods)
    store = store or FeatureStore()
    store.prefetch(catalog.samples(), workers)
    gen, forg = score_trial(catalog, store, trial_rng(seed, 0), methods, n_refs, n_genuine, n_forgery)
    return {m: roc_curve(gen[m], forg[m]) for m in methods}


def run_roc_experiment(catalog, method: str, seed: int = 0, **kw) -> RocCurve:
    """5 references, 20 genuine and 25 forgery tests per signer, pooled into one ROC."""
    return run_roc_experiments(catalog, (method,), seed, **kw)[method]


@dataclass(frozen=True)
class MethodSummary:
    method: str
    mean_eer: float
    std_eer: float
    n_trials: int
    eers: tuple[float, ...] = ()


@dataclass
class EvalReport:
    summaries: dict[str, MethodSummary]
    seed: int = 0

    def __getitem__(self, method) -> MethodSummary:
        return self.summaries[method]

    def __iter__(self):
        return iter(self.summaries.values())


def summarize(method: str, eers) -> MethodSummary:
    e = np.asarray(eers, dtype=float)
    return MethodSummary(method, float(e.mean()), float(e.std()), len(e), tuple(e.tolist()))


def run_table1_experiment(catalog, methods=METHODS, n_trials: int = 50, seed: int = 0,
                          n_refs: int = 5, n_genuine: int = 5, n_forgery: int = 5,
                          store: FeatureStore | None = None, workers: int = 1) -> EvalReport:
    """Repeated random partitions; mean and population std of the per-trial pooled EER."""
    methods = _check_methods(methods)
    if n_trials < 1:
        raise ProtocolError("n_trials must be at least 1")
    store = store or FeatureStore()
    store.prefetch(catalog.samples(), workers)
    eers = {m: [] for m in methods}
    for trial in range(n_trials):
        gen, forg = score_trial(catalog, store, trial_rng(seed, trial), methods,
                                n_refs, n_genuine, n_forgery)
        for m in methods:
            eers[m].append(compute_eer(gen[m], forg[m]))
    return EvalReport({m: summarize(m, eers[m]) for m in methods}, seed)


# ---------------------------------------------------------------------------
# reports

def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(float(x))


def write_roc_csv(path, curves: dict[str, RocCurve]) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method", "threshold", "far", "frr"])
        for m, c in curves.items():
            for t, a, r in c.points:
                w.writerow([m, _fmt(t), _fmt(a), _fmt(r)])


def write_eer_csv(path, report: EvalReport) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method", "mean_eer", "std_eer", "n_trials"])
        for s in report:
            w.writerow([s.method, _fmt(s.mean_eer), _fmt(s.std_eer), s.n_trials])


SCORE_COLUMNS = ("signer_id", "sample_id", "label", "j_baseline", "j_shape", "j_length", "j_fused")


def score_row(signer_id, sample_id, label, score) -> list[str]:
    vals = [score.j_baseline, score.j_shape, score.j_length, score.j_fused]
    return [signer_id, sample_id, label] + ["" if v is None else _fmt(v) for v in vals]


def write_scores_csv(path, rows) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SCORE_COLUMNS)
        w.writerows(rows)
