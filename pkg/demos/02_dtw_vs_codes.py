"""
Full DTW against the 4-point code distance
==========================================

Dividing the oriented DTW cost by the test length and the code distance by
four gives numbers on a similar footing. Here we look at how well they rank
the same segment pairs, and at the difference in cost.
"""
import time

import numpy as np
from scipy.stats import spearmanr

from sigucss.dtw import dtw_min_oriented, min_oriented_many, pack
from sigucss.encoding import code_matrix, pairwise_d2_min_oriented, subsample4

rng = np.random.default_rng(0)


def arc(rng):
    n = int(rng.integers(8, 41))
    ang = rng.uniform(0, 2 * np.pi) + rng.uniform(-0.08, 0.08) * np.arange(n)
    pts = np.cumsum(np.column_stack([np.cos(ang), np.sin(ang)]), axis=0)
    return pts / 50.0 + rng.uniform(-1.5, 1.5, 2)


segs = [arc(rng) for _ in range(300)]
lengths = np.array([len(s) for s in segs], dtype=float)

# one warm-up call compiles the DTW kernel
dtw_min_oriented(segs[0], segs[1])

t0 = time.perf_counter()
packed = pack(segs)
dtw_cost = np.vstack([min_oriented_many(s, packed)[0] for s in segs]) / lengths[:, None]
t_dtw = time.perf_counter() - t0

t0 = time.perf_counter()
coords, _ = code_matrix([subsample4(s) for s in segs])
code_cost = pairwise_d2_min_oriented(coords, coords) / 4
t_code = time.perf_counter() - t0

off = ~np.eye(len(segs), dtype=bool)
rho = spearmanr(dtw_cost[off], code_cost[off]).statistic
print(f"Spearman rank correlation over {off.sum()} pairs: {rho:.3f}")
print(f"DTW: {t_dtw:.3f} s   codes: {t_code:.4f} s   ({t_dtw / t_code:.0f}x)")

# values are not equal, only similarly ordered
k = rng.choice(off.sum(), 5, replace=False)
for d, c in zip(dtw_cost[off][k], code_cost[off][k]):
    print(f"  DTW/L {d:8.4f}   D2/4 {c:8.4f}")
