"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL/SKIPPED line that is printed in the terminal
summary, then asserts. Seeds are fixed up front; nothing is retried.
"""
import os
import time
import warnings

import numpy as np
import pytest
from scipy.stats import spearmanr

import conftest
from conftest import random_skeleton_input
from oracles import brute_force_dtw, sweep_eer
from sigucss.dtw import dtw_itakura, min_oriented_many, pack
from sigucss.encoding import code_matrix, pairwise_d2_min_oriented, subsample4
from sigucss.evaluation import (METHODS, compute_eer, run_table1_experiment, score_trial,
                                trial_rng)
from sigucss.features import FeatureStore
from sigucss.imaging import component_count, normalize_points, skeletonize
from sigucss.ingest import load_catalog
from sigucss.mos import format_tally, generate_cards, plan_cards, tally_responses
from sigucss.synthetic import make_corpus, write_corpus
from sigucss.ucss import build_graph, segment_vertex_paths

MANIFEST_ENV = "SIGUCSS_MCYT_MANIFEST"


def record(n, name, ok, detail):
    status = ok if isinstance(ok, str) else ("PASS" if ok else "FAIL")
    conftest.ACCEPTANCE_LINES.append(f"[{status}] C{n} {name}: {detail}")
    print(conftest.ACCEPTANCE_LINES[-1])
    return ok


@pytest.fixture(scope="module")
def synthetic(tmp_path_factory):
    """10 writers, 15 genuine and 10 forgery samples each, written and reloaded."""
    t0 = time.perf_counter()
    root = tmp_path_factory.mktemp("synthetic10")
    _, manifest = write_corpus(root, make_corpus(10, 15, 10, seed=0))
    catalog = load_catalog(root, manifest)
    store = FeatureStore()
    store.prefetch(catalog.samples())
    return catalog, store, time.perf_counter() - t0


# -- C1 ----------------------------------------------------------------------

def test_c1_dtw_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1001)
    mismatches = 0
    for _ in range(200):
        n, m = rng.integers(3, 7, size=2)
        a = rng.integers(-5, 6, size=(n, 2))
        b = rng.integers(-5, 6, size=(m, 2))
        if dtw_itakura(a, b).cost != brute_force_dtw(a, b):
            mismatches += 1
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < 5
    record(1, "DTW oracle equivalence", ok, f"{200 - mismatches}/200 exact, {elapsed:.2f} s (< 5 s)")
    assert mismatches == 0
    assert elapsed < 5


# -- C2 ----------------------------------------------------------------------

def test_c2_eer_oracle():
    rng = np.random.default_rng(1002)
    worst = 0.0
    for k in range(100):
        ng, nf = rng.integers(1, 21, size=2)
        if k % 2:
            # coarse grid to force ties
            g = rng.integers(0, 8, ng) / 4
            f = rng.integers(2, 10, nf) / 4
        else:
            g = rng.normal(0.0, 1.0, ng)
            f = rng.normal(1.0, 1.0, nf)
        worst = max(worst, abs(compute_eer(g, f) - sweep_eer(g, f)))
    ok = worst <= 1e-12
    record(2, "EER oracle equivalence", ok, f"max |diff| = {worst:.3g} over 100 sets (<= 1e-12)")
    assert ok


# -- C3 ----------------------------------------------------------------------

def test_c3_pipeline_invariants():
    rng = np.random.default_rng(1003)
    failures = []
    for k in range(100):
        img = random_skeleton_input(rng)
        skel = skeletonize(img)
        if not skel.foreground() <= img.foreground():
            failures.append((k, "anti-extensive"))
        if skeletonize(skel) != skel:
            failures.append((k, "idempotent"))
        if component_count(skel) != component_count(img):
            failures.append((k, "components"))
        g = build_graph(skel)
        if len(g) >= 2:
            norm = normalize_points(g.vertices).points
            if np.abs(norm.mean(axis=0)).max() > 1e-9 or np.abs(norm.std(axis=0) - 1).max() > 1e-9:
                failures.append((k, "normalization"))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            paths = segment_vertex_paths(g)
        uses = np.zeros(len(g), dtype=int)
        for _, p in paths:
            uses[list(set(p))] += 1
            if any(g.degree[v] > 2 for v in p[1:-1]):
                failures.append((k, "purity"))
        if np.any((uses == 0) & (g.degree > 0)) or np.any((uses > 1) & (g.degree <= 2)):
            failures.append((k, "coverage"))
    for _ in range(1000):
        n = int(rng.integers(2, 200))
        pts = rng.normal(size=(n, 2)) * rng.uniform(0.01, 1000, 2) + rng.uniform(-1e4, 1e4, 2)
        out = normalize_points(pts).points
        if np.abs(out.mean(axis=0)).max() > 1e-9 or np.abs(out.std(axis=0) - 1).max() > 1e-9:
            failures.append(("points", "normalization"))
    ok = not failures
    record(3, "pipeline invariant suite", ok,
           f"100 skeletons + 1000 point sets, {len(failures)} violations {failures[:3]}")
    assert ok


# -- C4 ----------------------------------------------------------------------

def smooth_segment(rng):
    """Arc of unit-pixel steps with mild constant curvature, in normalized-scale units."""
    length = int(rng.integers(8, 41))
    heading = rng.uniform(0, 2 * np.pi)
    angles = heading + rng.uniform(-0.08, 0.08) * np.arange(length)
    pts = np.cumsum(np.column_stack([np.cos(angles), np.sin(angles)]), axis=0)
    return (pts - pts[0]) / 50.0 + rng.uniform(-1.5, 1.5, 2)


def test_c4_dtw_code_rank_agreement():
    rng = np.random.default_rng(1004)
    segs = [smooth_segment(rng) for _ in range(1000)]
    lengths = np.array([len(s) for s in segs], dtype=float)
    packed = pack(segs)
    dtw_cost = np.vstack([min_oriented_many(s, packed)[0] for s in segs]) / lengths[:, None]
    coords, _ = code_matrix([subsample4(s) for s in segs])
    code_cost = pairwise_d2_min_oriented(coords, coords) / 4
    off = ~np.eye(len(segs), dtype=bool)
    rho = float(spearmanr(dtw_cost[off], code_cost[off]).statistic)
    ok = rho >= 0.8
    record(4, "DTW/L vs D2/4 rank agreement", ok, f"Spearman {rho:.4f} over {off.sum()} ordered pairs (>= 0.8)")
    assert ok


# -- C5 / C6 -----------------------------------------------------------------

UCSS_METHODS = ("baseline", "length", "shape", "fused")
C5_TRIALS = 10


def test_c5_synthetic_end_to_end(synthetic):
    catalog, store, setup = synthetic
    t0 = time.perf_counter()
    eers = {m: [] for m in UCSS_METHODS}
    gen_all = {m: [] for m in UCSS_METHODS}
    forg_all = {m: [] for m in UCSS_METHODS}
    for trial in range(C5_TRIALS):
        gen, forg = score_trial(catalog, store, trial_rng(5, trial), UCSS_METHODS, 5, 5, 5)
        for m in UCSS_METHODS:
            eers[m].append(compute_eer(gen[m], forg[m]))
            gen_all[m].extend(gen[m])
            forg_all[m].extend(forg[m])
    elapsed = setup + time.perf_counter() - t0
    mean_eer = {m: float(np.mean(v)) for m, v in eers.items()}
    ordered = {m: bool(np.mean(gen_all[m]) < np.mean(forg_all[m])) for m in UCSS_METHODS}
    checks = {
        "shape EER <= 0.15": mean_eer["shape"] <= 0.15,
        "fused <= shape + 0.02": mean_eer["fused"] <= mean_eer["shape"] + 0.02,
        "J(gen) < J(forg)": all(ordered.values()),
        "runtime < 60 s": elapsed < 60,
    }
    detail = ", ".join(f"{m} {mean_eer[m]:.3f}" for m in UCSS_METHODS)
    record(5, "synthetic end-to-end", all(checks.values()),
           f"EER {detail}; J ordering {ordered}; {elapsed:.1f} s; "
           f"failed: {[k for k, v in checks.items() if not v]}")
    assert all(checks.values()), checks


def best_time(fn, repeats=3):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def test_c6_speed(synthetic):
    catalog, store, _ = synthetic

    def run(method):
        return lambda: score_trial(catalog, store, trial_rng(6, 0), (method,), 5, 5, 5)

    run("baseline")()     # compile and warm caches before timing
    shape = best_time(run("shape"))
    baseline = best_time(run("baseline"))
    ratio = baseline / shape
    ok = ratio >= 50
    record(6, "encoded vs DTW speed", ok,
           f"baseline {baseline:.3f} s, shape {shape:.4f} s per trial, ratio {ratio:.0f}x (>= 50)")
    assert ok


# -- C7 ----------------------------------------------------------------------

TARGETS = {"baseline": 0.322, "length": 0.251, "shape": 0.194, "fused": 0.187}


def test_c7_full_reproduction():
    manifest = os.environ.get(MANIFEST_ENV)
    if not manifest:
        record(7, "full-scale reproduction", "SKIPPED", f"set {MANIFEST_ENV} to a licensed rendering")
        pytest.skip(f"{MANIFEST_ENV} not set")
    manifest = os.path.abspath(manifest)
    catalog = load_catalog(os.path.dirname(manifest), manifest)
    workers = int(os.environ.get("SIGUCSS_WORKERS", os.cpu_count() or 1))
    report = run_table1_experiment(catalog, METHODS, 50, seed=0, workers=workers)
    eer = {s.method: s.mean_eer for s in report}
    within = {m: abs(eer[m] - t) <= 0.03 for m, t in TARGETS.items()}
    order = (eer["fused"] <= eer["shape"] < eer["length"] < eer["baseline"]
             and eer["method2"] >= max(eer[m] for m in TARGETS))
    ok = all(within.values()) and order
    record(7, "full-scale reproduction", ok,
           ", ".join(f"{m} {v:.3f}" for m, v in eer.items()) + f"; within 3pp {within}; ordering {order}")
    assert ok


# -- C8 ----------------------------------------------------------------------

def test_c8_mos_tooling(synthetic):
    catalog, _, _ = synthetic
    cards = plan_cards(catalog, 30, seed=8)
    five = all(sum(t == "T" for _, t in c.slots) == 5 and len(c.slots) == 10 for c in cards)
    images, key = generate_cards(catalog, 3, seed=8)
    five = five and len(images) == 3 and sum(t == "T" for *_, t in key) == 15

    # planted confusion: per card flip genuine slots and forged slots at fixed rates
    key = [(c.card_id, s, t) for c in cards for s, (_, t) in enumerate(c.slots, start=1)]
    rng = np.random.default_rng(88)
    genuine = [k for k in key if k[2] == "T"]
    forged = [k for k in key if k[2] == "F"]
    flip_g = {genuine[i][:2] for i in rng.permutation(len(genuine))[:37]}
    flip_f = {forged[i][:2] for i in rng.permutation(len(forged))[:16]}
    responses = []
    for c, s, t in key:
        flipped = (c, s) in flip_g or (c, s) in flip_f
        responses.append((c, s, ("F" if t == "T" else "T") if flipped else t))
    tally = tally_responses(responses, key)
    exact = tally.frr == 37 / len(genuine) and tally.far == 16 / len(forged)
    report = format_tally(tally)
    reference = "human_reference,239,0.2560,0.1100" in report
    ok = five and exact and reference
    record(8, "MOS tooling", ok,
           f"5T/5F on all cards {five}; planted FRR {tally.frr:.4f} FAR {tally.far:.4f} exact {exact}; "
           f"reference line (FRR 0.256, FAR 0.110) present {reference}")
    assert ok
