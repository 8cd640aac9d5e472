"""Randomized detection and scoring of mirror-symmetric pixel pairs.

A candidate pair (x_i, x_j) of edge pixels defines a reflection across the
perpendicular bisector of the two pixels.  Its score compares the edge-curve
normals at both pixels after reflecting each curve onto the other:

    score = | mean_a [ (M n_i(a)) . n_j(a) ]  +  mean_a [ (M n_j(a)) . n_i(a) ] |

which is 2 for a perfectly mirrored local contour.  The absolute value
resolves the arbitrary global orientation of traced normals.  A second,
appearance-based filter keeps a pair only when the unit image gradients at
the two pixels map onto each other under the same reflection.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from symmpix.config import PipelineConfig
from symmpix.geometry import (
    ReflectionTransform,
    reflect_vectors,
    reflect_points,
    reflection_from_pair,
)
from symmpix.image import (
    Curve,
    EdgeMap,
    GradientField,
    RasterImage,
    compute_gradient,
    curve_normals,
    detect_edges,
    extract_curves_batch,
    rgb_to_lab,
)

__all__ = [
    "CandidatePair",
    "PairDetection",
    "detection_probability",
    "normal_agreement_score",
    "filter_by_gradient",
    "sample_candidates",
    "detect_pairs",
    "pairs_to_json",
    "pairs_from_json",
]


@dataclass
class CandidatePair:
    """A scored mirror-pixel hypothesis; i < j index the edge-pixel list."""

    i: int
    j: int
    xi: tuple[int, int]
    xj: tuple[int, int]
    transform: ReflectionTransform
    score: float
    ci: Curve | None = None
    cj: Curve | None = None


@dataclass
class PairDetection:
    """detect_pairs output: retained pairs plus the fields they came from."""

    pairs: list[CandidatePair]
    edges: EdgeMap
    gradient: GradientField
    edge_pixels: np.ndarray  # (n, 2) int, (x, y)


def detection_probability(n_edges: int, h: int, u: int) -> float:
    """Chance that h uniform draws hit within a u-wide window of the true
    mirror partner among n_edges edge pixels.

    The per-draw hit probability is u^2 / n, clamped to certainty once the
    window covers the whole candidate set (u^2 >= n - 1).
    """
    if n_edges < 2:
        raise ValueError("need at least 2 edge pixels")
    if h < 0:
        raise ValueError("h must be >= 0")
    if u < 1:
        raise ValueError("u must be >= 1")
    if u * u >= n_edges - 1:
        per_draw = 1.0
    else:
        per_draw = (u * u) / n_edges
    return min(1.0, 1.0 - (1.0 - per_draw) ** h)


def normal_agreement_score(ci: Curve, cj: Curve, transform: ReflectionTransform) -> float:
    """Discretized normal-agreement integral; in [0, 2], 2 = perfect mirror.

    Both global normal orientations of the partner curve are tried and the
    better one kept (edge tracing direction is arbitrary).
    """
    if ci.normals is None or cj.normals is None:
        raise ValueError("curves need normals; call curve_normals first")
    if len(ci.samples) != len(cj.samples):
        raise ValueError("mismatched curve sample counts")
    ref_i = reflect_vectors(transform, ci.normals)
    ref_j = reflect_vectors(transform, cj.normals)
    term_ij = float(np.mean(np.einsum("ij,ij->i", ref_i, cj.normals)))
    term_ji = float(np.mean(np.einsum("ij,ij->i", ref_j, ci.normals)))
    return abs(term_ij + term_ji)


def filter_by_gradient(pair: CandidatePair, grad: GradientField, epsilon: float) -> bool:
    """Keep a pair iff unit gradients agree under its reflection: g_i . M g_j > 1 - eps."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must be in (0, 1)")
    gi = grad.at(pair.xi[0], pair.xi[1]).astype(np.float64)
    gj = grad.at(pair.xj[0], pair.xj[1]).astype(np.float64)
    ni = float(np.hypot(gi[0], gi[1]))
    nj = float(np.hypot(gj[0], gj[1]))
    if ni == 0.0 or nj == 0.0:
        return False
    gi = gi / ni
    gj = gj / nj
    return float(gi @ pair.transform.matrix @ gj) > 1.0 - epsilon


# ---------------------------------------------------------------------------
# Batched candidate generation and scoring
# ---------------------------------------------------------------------------

def _candidate_index_pairs(n_valid: int, h: int, rng: np.random.Generator) -> np.ndarray:
    """For each valid pixel draw h distinct partners; dedupe unordered pairs."""
    h_eff = min(h, n_valid - 1)
    rows = []
    for i in range(n_valid):
        draws = rng.choice(n_valid - 1, size=h_eff, replace=False)
        partners = np.where(draws >= i, draws + 1, draws)
        lo = np.minimum(i, partners)
        hi = np.maximum(i, partners)
        rows.append(np.column_stack([lo, hi]))
    allpairs = np.concatenate(rows, axis=0)
    return np.unique(allpairs, axis=0)


def _batch_transforms(pa: np.ndarray, pb: np.ndarray):
    """theta (canonical), t, and the 2x2 reflection matrices for point pairs."""
    d = pa - pb
    theta = np.arctan2(d[:, 0], -d[:, 1])
    theta = np.where(theta <= -0.5 * np.pi, theta + np.pi, theta)
    theta = np.where(theta > 0.5 * np.pi, theta - np.pi, theta)
    t = (pa + pb) * 0.5
    c2 = np.cos(2.0 * theta)
    s2 = np.sin(2.0 * theta)
    mats = np.empty((len(pa), 2, 2))
    mats[:, 0, 0] = c2
    mats[:, 0, 1] = s2
    mats[:, 1, 0] = s2
    mats[:, 1, 1] = -c2
    return theta, t, mats


def _score_block(
    idx_pairs: np.ndarray,
    pixels: np.ndarray,
    samples: np.ndarray,
    normals: np.ndarray,
    width: int,
    height: int,
):
    """Scores, transforms, and in-bounds coverage for a block of candidates.

    Samples of each reflected curve must mostly stay inside the image;
    the score is averaged over the in-bounds parameter positions only.
    Returns (scores, theta, t, coverage) with coverage the smaller of the
    two in-bounds fractions.
    """
    ia = idx_pairs[:, 0]
    ib = idx_pairs[:, 1]
    pa = pixels[ia].astype(np.float64)
    pb = pixels[ib].astype(np.float64)
    theta, t, mats = _batch_transforms(pa, pb)

    na = normals[ia]  # (m, p, 2)
    nb = normals[ib]
    ref_a = np.einsum("mkl,mpl->mpk", mats, na)
    ref_b = np.einsum("mkl,mpl->mpk", mats, nb)

    pos_a = np.einsum("mkl,mpl->mpk", mats, samples[ia] - t[:, None, :]) + t[:, None, :]
    pos_b = np.einsum("mkl,mpl->mpk", mats, samples[ib] - t[:, None, :]) + t[:, None, :]
    in_a = (
        (pos_a[:, :, 0] >= 0.0)
        & (pos_a[:, :, 0] <= width - 1.0)
        & (pos_a[:, :, 1] >= 0.0)
        & (pos_a[:, :, 1] <= height - 1.0)
    )
    in_b = (
        (pos_b[:, :, 0] >= 0.0)
        & (pos_b[:, :, 0] <= width - 1.0)
        & (pos_b[:, :, 1] >= 0.0)
        & (pos_b[:, :, 1] <= height - 1.0)
    )
    cnt_a = in_a.sum(axis=1)
    cnt_b = in_b.sum(axis=1)
    p = na.shape[1]
    cov = np.minimum(cnt_a, cnt_b) / p

    dots_ab = np.einsum("mpk,mpk->mp", ref_a, nb)
    dots_ba = np.einsum("mpk,mpk->mp", ref_b, na)
    with np.errstate(invalid="ignore"):
        term_ab = np.where(cnt_a > 0, (dots_ab * in_a).sum(axis=1) / np.maximum(cnt_a, 1), 0.0)
        term_ba = np.where(cnt_b > 0, (dots_ba * in_b).sum(axis=1) / np.maximum(cnt_b, 1), 0.0)
    scores = np.abs(term_ab + term_ba)
    return scores, theta, t, cov


_SCORE_BLOCK = 65536


def sample_candidates(
    edge_pixels: np.ndarray,
    curves: list[Curve | None],
    h: int,
    seed: int,
    image_size: tuple[int, int] | None = None,
) -> list[CandidatePair]:
    """Draw h partners per valid edge pixel and score every candidate pair.

    Only pixels with a valid curve participate.  Deterministic given the
    seed; the result is sorted by (i, j).  Candidates whose reflected curve
    has under half of its samples inside the image are dropped.
    """
    if h < 1:
        raise ValueError("h must be >= 1")
    valid_idx = np.array([k for k, c in enumerate(curves) if c is not None], dtype=np.int64)
    if len(valid_idx) < 2:
        raise ValueError("need at least 2 edge pixels with valid curves")
    rng = np.random.default_rng(seed)
    vpairs = _candidate_index_pairs(len(valid_idx), h, rng)

    samples = np.stack([curves[k].samples for k in valid_idx])
    normals = np.stack([curves[k].normals for k in valid_idx])
    pixels = edge_pixels[valid_idx]
    if image_size is None:
        width = int(edge_pixels[:, 0].max()) + 1
        height = int(edge_pixels[:, 1].max()) + 1
    else:
        width, height = image_size

    out: list[CandidatePair] = []
    for lo in range(0, len(vpairs), _SCORE_BLOCK):
        block = vpairs[lo : lo + _SCORE_BLOCK]
        scores, theta, t, cov = _score_block(block, pixels, samples, normals, width, height)
        for row, sc, th, tt, cv in zip(block, scores, theta, t, cov):
            if cv < 0.5:
                continue
            a, b = int(row[0]), int(row[1])
            gi, gj = int(valid_idx[a]), int(valid_idx[b])
            out.append(
                CandidatePair(
                    i=gi,
                    j=gj,
                    xi=(int(edge_pixels[gi, 0]), int(edge_pixels[gi, 1])),
                    xj=(int(edge_pixels[gj, 0]), int(edge_pixels[gj, 1])),
                    transform=ReflectionTransform(theta=float(th), t=(float(tt[0]), float(tt[1]))),
                    score=float(sc),
                    ci=curves[gi],
                    cj=curves[gj],
                )
            )
    out.sort(key=lambda pr: (pr.i, pr.j))
    return out


def _gradient_filter_batch(pairs: list[CandidatePair], grad: GradientField, epsilon: float) -> list[CandidatePair]:
    if not pairs:
        return []
    gi = np.array([grad.at(p.xi[0], p.xi[1]) for p in pairs])
    gj = np.array([grad.at(p.xj[0], p.xj[1]) for p in pairs])
    ni = np.hypot(gi[:, 0], gi[:, 1])
    nj = np.hypot(gj[:, 0], gj[:, 1])
    nonzero = (ni > 0) & (nj > 0)
    ni = np.where(ni > 0, ni, 1.0)
    nj = np.where(nj > 0, nj, 1.0)
    gi = gi / ni[:, None]
    gj = gj / nj[:, None]
    mats = np.stack([p.transform.matrix for p in pairs])
    agree = np.einsum("mk,mkl,ml->m", gi, mats, gj)
    keep = nonzero & (agree > 1.0 - epsilon)
    return [p for p, k in zip(pairs, keep) if k]


def detect_pairs(img: RasterImage, cfg: PipelineConfig | None = None) -> PairDetection:
    """Full pipeline: edges -> curves -> sampled candidates -> score and
    gradient filters.  Deterministic given cfg.seed."""
    cfg = (cfg or PipelineConfig()).validated()
    lab = rgb_to_lab(img) if img.space == "rgb" else img
    edges = detect_edges(lab, cfg.canny_low, cfg.canny_high, cfg.canny_sigma)
    grad = compute_gradient(lab)
    edge_pixels = edges.edge_pixels
    if len(edge_pixels) == 0:
        warnings.warn("no edges found in image", RuntimeWarning, stacklevel=2)
        return PairDetection(pairs=[], edges=edges, gradient=grad, edge_pixels=edge_pixels)

    # lift curves chain by chain (shared interpolation per chain)
    curves: list[Curve | None] = [None] * len(edge_pixels)
    index_of = {(int(x), int(y)): k for k, (x, y) in enumerate(edge_pixels)}
    for cid in range(len(edges.chains)):
        chain = edges.chains[cid]
        positions = np.arange(len(chain))
        got = extract_curves_batch(edges, cid, positions, cfg.curve_samples)
        for pos, curve in zip(positions, got):
            if curve is None:
                continue
            key = (int(chain[pos, 0]), int(chain[pos, 1]))
            k = index_of.get(key)
            if k is not None:
                try:
                    curves[k] = curve_normals(curve)
                except ValueError:
                    curves[k] = None

    n_valid = sum(c is not None for c in curves)
    if n_valid < 2:
        warnings.warn("fewer than 2 edge pixels carry valid curves", RuntimeWarning, stacklevel=2)
        return PairDetection(pairs=[], edges=edges, gradient=grad, edge_pixels=edge_pixels)

    cands = sample_candidates(
        edge_pixels,
        curves,
        cfg.partner_draws,
        cfg.seed,
        image_size=(lab.width, lab.height),
    )
    scored = [p for p in cands if p.score > cfg.score_threshold]
    kept = _gradient_filter_batch(scored, grad, cfg.epsilon)
    return PairDetection(pairs=kept, edges=edges, gradient=grad, edge_pixels=edge_pixels)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def pairs_to_json(pairs: list[CandidatePair]) -> list[dict]:
    return [
        {
            "xi": [p.xi[0], p.xi[1]],
            "xj": [p.xj[0], p.xj[1]],
            "theta": p.transform.theta,
            "t": [p.transform.t[0], p.transform.t[1]],
            "score": p.score,
        }
        for p in pairs
    ]


def pairs_from_json(items: list[dict]) -> list[CandidatePair]:
    out = []
    for k, item in enumerate(items):
        xi = (int(item["xi"][0]), int(item["xi"][1]))
        xj = (int(item["xj"][0]), int(item["xj"][1]))
        out.append(
            CandidatePair(
                i=k,
                j=k,
                xi=xi,
                xj=xj,
                transform=ReflectionTransform(theta=float(item["theta"]), t=(float(item["t"][0]), float(item["t"][1]))),
                score=float(item["score"]),
            )
        )
    return out
