"""Structural metrics for trained encoders.

Trained stages are classified by how their first-stage reconstruction
vectors and posteriors respond to hump-pair inputs:

* factorial-like: most codes reconstruct a single localized hump (codes
  specialize on individual object positions);
* joint-like: most codes reconstruct a two-hump pattern and respond only to
  a narrow range of pair centroids (codes encode whole configurations);
* invariant-like: posteriors depend on the pair centroid but are nearly
  unchanged when only the separation varies.

Bumps are contiguous circular runs of components above half of the vector's
(max - min) range.  Classification thresholds live in thresholds.json,
calibrated once against reference training runs and then frozen.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import InvalidInputError
from .model import ChainModel
from .sources import HumpPairSource

CLASSIFICATIONS = ("factorial-like", "joint-like", "invariant-like", "mixed")


def load_thresholds() -> dict:
    with resources.files(__package__).joinpath("thresholds.json").open() as fh:
        return json.load(fh)


def circular_regions(mask: np.ndarray) -> list:
    """Contiguous True runs of a circular boolean mask, as index lists."""
    m = np.asarray(mask, dtype=bool)
    size = m.size
    if not m.any():
        return []
    if m.all():
        return [list(range(size))]
    starts = [i for i in range(size) if m[i] and not m[i - 1]]
    regions = []
    for s in starts:
        idx = []
        i = s
        while m[i % size]:
            idx.append(i % size)
            i += 1
        regions.append(idx)
    return regions


def bump_regions(v: np.ndarray, rel_threshold: float) -> list:
    """Circular regions above min + rel_threshold * (max - min)."""
    v = np.asarray(v, dtype=np.float64)
    lo, hi = v.min(), v.max()
    if not np.isfinite(lo) or not np.isfinite(hi) or hi <= lo:
        return []
    return circular_regions(v > lo + rel_threshold * (hi - lo))


def bump_count(v: np.ndarray, rel_threshold: float = 0.5) -> int:
    return len(bump_regions(v, rel_threshold))


def bump_peaks(v: np.ndarray, rel_threshold: float = 0.5) -> list:
    """1-based position of the maximum inside each bump region."""
    v = np.asarray(v, dtype=np.float64)
    peaks = []
    for region in bump_regions(v, rel_threshold):
        peaks.append(int(region[int(np.argmax(v[region]))]) + 1)
    return peaks


def circular_separation(a: int, b: int, size: int) -> int:
    d = abs(int(a) - int(b)) % size
    return min(d, size - d)


def pair_centroid_keys(source: HumpPairSource) -> np.ndarray:
    """Centroid of each enumerated pair in half-pixel units (0..2*dim-1).

    The centroid is the midpoint of the forward arc from pos1 to pos2, so
    configurations sharing a key differ only in object separation.
    """
    pos = source.positions()
    off = source.offsets()
    return (2 * (pos[:, 0] - 1) + off) % (2 * source.dim)


def response_spreads(P: np.ndarray, source: HumpPairSource, weights: np.ndarray) -> np.ndarray:
    """Posterior-weighted circular spread of pair centroids, per code index.

    0 means a code responds only at one centroid; 1 means its response is
    spread uniformly around the circle.
    """
    theta = np.pi * pair_centroid_keys(source) / source.dim
    phasor = np.exp(1j * theta)
    spreads = np.empty(P.shape[1])
    for y in range(P.shape[1]):
        w = weights * P[:, y]
        total = w.sum()
        spreads[y] = 1.0 if total <= 0 else 1.0 - abs(w @ phasor) / total
    return spreads


def separation_invariance(P: np.ndarray, source: HumpPairSource, weights: np.ndarray) -> dict:
    """Posterior variation across separations vs across centroids.

    Per input: the total-variation distance between its posterior and the
    mean posterior of all inputs sharing its pair centroid (sep_dev), and
    the distance between that class mean and the global mean posterior
    (cen_dev).  An invariant encoder has small sep_dev but large cen_dev.
    """
    keys = pair_centroid_keys(source)
    global_mean = weights @ P
    sep_dev = np.empty(P.shape[0])
    cen_dev = np.empty(P.shape[0])
    for key in np.unique(keys):
        mask = keys == key
        class_mean = P[mask].mean(axis=0)
        sep_dev[mask] = 0.5 * np.abs(P[mask] - class_mean).sum(axis=1)
        cen_dev[mask] = 0.5 * np.abs(class_mean - global_mean).sum()
    return {"sep_dev": sep_dev, "cen_dev": cen_dev}


@dataclass
class EncoderTypeReport:
    """First-stage structural metrics plus the resulting classification."""

    bump_counts: list
    peak_positions: list
    response_spread: list
    sep_invariant_fraction: float
    cen_variation_fraction: float
    median_sep_dev: float
    median_cen_dev: float
    classification: str
    thresholds: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "classification": self.classification,
            "bump_counts": list(self.bump_counts),
            "peak_positions": [list(p) for p in self.peak_positions],
            "response_spread": [float(v) for v in self.response_spread],
            "sep_invariant_fraction": self.sep_invariant_fraction,
            "cen_variation_fraction": self.cen_variation_fraction,
            "median_sep_dev": self.median_sep_dev,
            "median_cen_dev": self.median_cen_dev,
            "thresholds": dict(self.thresholds),
        }


def classify_encoder(model: ChainModel, source: HumpPairSource,
                     thresholds: dict = None) -> EncoderTypeReport:
    """Classify a trained model's first stage against a hump-pair source."""
    stage = model.stages[0]
    if stage.dim_in != source.dim:
        raise InvalidInputError(
            f"first stage dim_in {stage.dim_in} != source dim {source.dim}"
        )
    th = load_thresholds() if thresholds is None else dict(thresholds)
    maj = th["majority_fraction"]
    rel = th["bump_relative_threshold"]

    data = source.enumerate_configs()
    P = stage.posterior_batch(data.vectors)
    degenerate = not np.all(np.isfinite(P)) or not np.all(np.isfinite(stage.recon))

    if degenerate:
        return EncoderTypeReport(
            bump_counts=[0] * stage.M, peak_positions=[[] for _ in range(stage.M)],
            response_spread=[1.0] * stage.M, sep_invariant_fraction=0.0,
            cen_variation_fraction=0.0, median_sep_dev=float("nan"),
            median_cen_dev=float("nan"), classification="mixed", thresholds=th,
        )

    counts = [bump_count(r, rel) for r in stage.recon]
    peaks = [bump_peaks(r, rel) for r in stage.recon]
    spreads = response_spreads(P, source, data.weights)
    inv = separation_invariance(P, source, data.weights)
    frac_sep = float(np.mean(inv["sep_dev"] <= th["separation_variation_max"]))
    frac_cen = float(np.mean(inv["cen_dev"] > th["separation_variation_max"]))

    counts_arr = np.asarray(counts)
    frac_nondegenerate = float(np.mean(counts_arr >= 1))
    frac_single = float(np.mean(counts_arr == 1))
    frac_double_tight = float(np.mean(
        (counts_arr == 2) & (spreads <= th["response_spread_max"])
    ))

    if frac_sep >= maj and frac_cen >= maj and frac_nondegenerate >= maj:
        label = "invariant-like"
    elif frac_double_tight >= maj:
        label = "joint-like"
    elif frac_single >= maj:
        label = "factorial-like"
    else:
        label = "mixed"

    return EncoderTypeReport(
        bump_counts=counts, peak_positions=peaks,
        response_spread=[float(v) for v in spreads],
        sep_invariant_fraction=frac_sep, cen_variation_fraction=frac_cen,
        median_sep_dev=float(np.median(inv["sep_dev"])),
        median_cen_dev=float(np.median(inv["cen_dev"])),
        classification=label, thresholds=th,
    )
