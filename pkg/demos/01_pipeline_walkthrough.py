"""
From pen trajectory to skeleton segments
========================================

One synthetic signature is rendered to a bitmap, thinned, and cut into
unambiguously ordered segments, each summarized by a 9-scalar code.
"""
import numpy as np

from sigucss.imaging import oversample_spline, rasterize, dilate, skeletonize
from sigucss.synthetic import make_corpus
from sigucss.ucss import build_graph, skeleton_segments

sig = make_corpus(n_writers=2, n_genuine=1, n_forgery=0, seed=4)[0]
print(f"{sig.sample_id}: {len(sig)} pen samples")

# densify along a Catmull-Rom spline so consecutive points are < 0.5 px apart
dense = oversample_spline(sig, max_step=0.5)
print("oversampled to", len(dense), "points")

# round to pixels, then thicken with a radius-2 disk to mimic ink
ink = dilate(rasterize(dense), radius=2)
print("ink pixels:", ink.count, "canvas", ink.width, "x", ink.height)

# Zhang-Suen thinning back to a one-pixel skeleton
skel = skeletonize(ink)
g = build_graph(skel)
print("skeleton pixels:", skel.count, "| endpoints:", int((g.degree == 1).sum()),
      "| junction pixels:", int((g.degree > 2).sum()))

# a coarse ASCII view of the skeleton: each character covers a 2x2 block
px = skel.pixels[: skel.height // 2 * 2, : skel.width // 2 * 2]
small = px.reshape(px.shape[0] // 2, 2, px.shape[1] // 2, 2).any(axis=(1, 3))
for row in small:
    print("".join("#" if v else " " for v in row).rstrip())

segs = skeleton_segments(skel)
kinds = {k: sum(s.kind == k for s in segs) for k in ("internal", "extremity", "isolated", "cycle")}
print(len(segs), "segments:", kinds)

# the code keeps 4 equally spaced points plus the point count
longest = max(segs, key=len)
print("longest segment has", longest.length, "points; code:")
print(np.round(longest.code.pairs, 3), "L =", longest.code.length)
