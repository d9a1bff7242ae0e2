"""Synthetic signature corpora for tests, demos and desk-scale benchmarks.

Each writer owns a parametric trajectory: a left-to-right drift plus a few
sinusoids per axis, which produces loops and self-crossings similar to
cursive handwriting. Genuine samples perturb the writer's own parameters
slightly. Forgeries of a writer are samples of the other writers' templates
(same complexity and size), cycled so every other writer contributes.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .ingest import FORGERY, GENUINE, OnlineSignature, SampleRef, catalog_from_refs, \
    write_manifest, write_points_file


@dataclass(frozen=True)
class Template:
    width: float
    amp_x: np.ndarray
    amp_y: np.ndarray
    freq_x: np.ndarray
    freq_y: np.ndarray
    phase_x: np.ndarray
    phase_y: np.ndarray
    n_points: int = 120


def make_template(rng: np.random.Generator, complexity: int = 3, width: float = 160.0,
                  height: float = 30.0, n_points: int = 120) -> Template:
    k = complexity
    return Template(
        width=width,
        amp_x=rng.uniform(0.3, 1.0, k) * width / (4 * k),
        amp_y=rng.uniform(0.4, 1.0, k) * height / k,
        freq_x=rng.integers(2, 8, k).astype(float),
        freq_y=rng.integers(2, 8, k).astype(float),
        phase_x=rng.uniform(0, 2 * np.pi, k),
        phase_y=rng.uniform(0, 2 * np.pi, k),
        n_points=n_points,
    )


def trace(tpl: Template, t: np.ndarray) -> np.ndarray:
    arg_x = 2 * np.pi * np.outer(t, tpl.freq_x) + tpl.phase_x
    arg_y = 2 * np.pi * np.outer(t, tpl.freq_y) + tpl.phase_y
    x = tpl.width * t + (tpl.amp_x * np.sin(arg_x)).sum(axis=1)
    y = (tpl.amp_y * np.sin(arg_y)).sum(axis=1)
    return np.column_stack([x, y])


def jittered(tpl: Template, rng: np.random.Generator, amount: float = 1.0) -> np.ndarray:
    """One sample of ``tpl``; ``amount`` scales every perturbation."""
    k = len(tpl.amp_x)
    t = np.linspace(0, 1, tpl.n_points)
    # smooth monotone time warp
    t = t + amount * 0.01 * rng.normal() * np.sin(np.pi * t)
    noisy = replace(
        tpl,
        amp_x=tpl.amp_x * (1 + amount * 0.04 * rng.normal(size=k)),
        amp_y=tpl.amp_y * (1 + amount * 0.04 * rng.normal(size=k)),
        phase_x=tpl.phase_x + amount * 0.04 * rng.normal(size=k),
        phase_y=tpl.phase_y + amount * 0.04 * rng.normal(size=k),
    )
    pts = trace(noisy, t)
    angle = amount * np.deg2rad(2.0) * rng.normal()
    rot = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
    scale = 1 + amount * 0.03 * rng.normal()
    pts = scale * pts @ rot.T
    pts += amount * 0.3 * rng.normal(size=pts.shape)
    return pts + rng.uniform(0, 50, 2)


def make_corpus(n_writers: int = 10, n_genuine: int = 15, n_forgery: int = 10,
                seed: int = 0, complexity: int = 3, jitter: float = 1.0) -> list[OnlineSignature]:
    if n_writers < 2 and n_forgery:
        raise ValueError("forgeries come from other writers; need at least 2 writers")
    rng = np.random.default_rng(seed)
    templates = [make_template(rng, complexity) for _ in range(n_writers)]
    sigs = []
    for w, own in enumerate(templates):
        signer = f"w{w:03d}"
        for n in range(n_genuine):
            sigs.append(OnlineSignature(jittered(own, rng, jitter), signer, f"{signer}_g{n:03d}", GENUINE))
        for n in range(n_forgery):
            other = templates[(w + 1 + n % (n_writers - 1)) % n_writers]
            sigs.append(OnlineSignature(jittered(other, rng, jitter), signer, f"{signer}_f{n:03d}", FORGERY))
    return sigs


def write_corpus(root, sigs, manifest_name: str = "manifest.csv"):
    """Write point files plus a manifest under ``root``; returns (catalog, manifest path)."""
    root = Path(root)
    refs = []
    for sig in sigs:
        path = root / sig.signer_id / f"{sig.sample_id}.txt"
        path.parent.mkdir(parents=True, exist_ok=True)
        write_points_file(path, sig)
        refs.append(SampleRef(sig.signer_id, sig.sample_id, sig.label, path))
    manifest = root / manifest_name
    write_manifest(manifest, refs, root)
    return catalog_from_refs(refs), manifest
