"""Image loading, Lab conversion, gradients, edge detection, edge curves.

Conventions used across the package:

* pixel coordinates are ``(x, y)`` with x the column in [0, w) and y the
  row in [0, h); arrays are stored row-major as ``(h, w, ...)``.
* RGB images are uint8, Lab images are float64 with L in [0, 100].
* edges come from a classic detector (Gaussian smoothing, Sobel gradients,
  non-maximum suppression, hysteresis) and are chained into contours so a
  fixed-arc-length curve with unit normals can be lifted at any edge pixel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from PIL import Image, UnidentifiedImageError

__all__ = [
    "RasterImage",
    "GradientField",
    "EdgeMap",
    "Curve",
    "load_image",
    "rgb_to_lab",
    "compute_gradient",
    "detect_edges",
    "extract_curve",
    "extract_curves_batch",
    "curve_normals",
]


@dataclass
class RasterImage:
    """A 3-channel raster: 8-bit RGB or real-valued CIE Lab."""

    data: np.ndarray  # (h, w, 3)
    space: str = "rgb"  # "rgb" | "lab"

    def __post_init__(self) -> None:
        if self.data.ndim != 3 or self.data.shape[2] != 3:
            raise ValueError(f"expected (h, w, 3) data, got {self.data.shape}")
        if self.data.shape[0] < 1 or self.data.shape[1] < 1:
            raise ValueError("zero-dimension image")
        if self.space not in ("rgb", "lab"):
            raise ValueError(f"unknown color space {self.space!r}")

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


@dataclass
class GradientField:
    """Per-pixel 2-vector field (gx, gy) plus its Euclidean magnitude."""

    vectors: np.ndarray  # (h, w, 2)
    magnitude: np.ndarray  # (h, w)

    def at(self, x: int, y: int) -> np.ndarray:
        return self.vectors[y, x]


@dataclass
class Curve:
    """Uniform arc-length samples of an edge contour centred on an anchor.

    ``samples[j]`` sits at parameter alpha_j = j / (p - 1); the interpolated
    point at alpha = 0.5 is the anchor, and arc length to both ends is equal.
    """

    anchor: tuple[float, float]
    samples: np.ndarray  # (p, 2) float64
    normals: np.ndarray | None = None  # (p, 2) unit vectors

    @property
    def n_samples(self) -> int:
        return len(self.samples)

    def point_at(self, alpha: float) -> np.ndarray:
        """Linear interpolation of the sample polyline at alpha in [0, 1]."""
        p = len(self.samples)
        pos = alpha * (p - 1)
        j = min(int(math.floor(pos)), p - 2)
        frac = pos - j
        return (1.0 - frac) * self.samples[j] + frac * self.samples[j + 1]


@dataclass
class EdgeMap:
    """Binary edge mask plus contour chains.

    Each chain is an (n, 2) int array of (x, y) pixels ordered along the
    contour; ``chain_id``/``chain_pos`` map a pixel back into its chain, so
    predecessor/successor links are the neighbouring rows of the chain.
    """

    mask: np.ndarray  # (h, w) bool
    chains: list[np.ndarray] = field(default_factory=list)
    chain_id: np.ndarray | None = None  # (h, w) int32, -1 off-edge
    chain_pos: np.ndarray | None = None  # (h, w) int32
    closed: list[bool] = field(default_factory=list)
    _chain_arcs: dict[int, np.ndarray] = field(default_factory=dict, repr=False)

    @property
    def edge_pixels(self) -> np.ndarray:
        """(n, 2) int array of (x, y) edge pixels in row-major scan order."""
        ys, xs = np.nonzero(self.mask)
        return np.column_stack([xs, ys]).astype(np.int64)

    def chain_arcs(self, cid: int) -> np.ndarray:
        """Cumulative arc length along chain cid (diagonal steps cost sqrt 2)."""
        cached = self._chain_arcs.get(cid)
        if cached is None:
            pts = self.chains[cid].astype(np.float64)
            if len(pts) == 1:
                cached = np.zeros(1)
            else:
                seg = np.hypot(np.diff(pts[:, 0]), np.diff(pts[:, 1]))
                cached = np.concatenate([[0.0], np.cumsum(seg)])
            self._chain_arcs[cid] = cached
        return cached


# ---------------------------------------------------------------------------
# Loading and color conversion
# ---------------------------------------------------------------------------

def load_image(path: str) -> RasterImage:
    """Load a PNG/PPM/JPEG file as an RGB RasterImage."""
    try:
        with Image.open(path) as img:
            rgb = img.convert("RGB")
            data = np.asarray(rgb, dtype=np.uint8)
    except FileNotFoundError:
        raise
    except (UnidentifiedImageError, OSError, SyntaxError) as exc:
        raise ValueError(f"unreadable image file: {path} ({exc})") from exc
    if data.ndim != 3 or data.shape[0] < 1 or data.shape[1] < 1:
        raise ValueError(f"unreadable image file: {path} (zero-dimension)")
    return RasterImage(data=data, space="rgb")


# sRGB -> XYZ (D65) matrix and white point
_SRGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
_D65 = np.array([0.95047, 1.0, 1.08883])


def rgb_to_lab(img: RasterImage) -> RasterImage:
    """Convert 8-bit sRGB to CIE Lab under the D65 white point."""
    if img.space != "rgb":
        raise ValueError("rgb_to_lab expects an RGB image")
    srgb = img.data.astype(np.float64) / 255.0
    linear = np.where(srgb <= 0.04045, srgb / 12.92, ((srgb + 0.055) / 1.055) ** 2.4)
    xyz = linear @ _SRGB_TO_XYZ.T
    ratio = xyz / _D65
    delta = 6.0 / 29.0
    f = np.where(
        ratio > delta**3,
        np.cbrt(ratio),
        ratio / (3.0 * delta**2) + 4.0 / 29.0,
    )
    lab = np.empty_like(xyz)
    lab[..., 0] = 116.0 * f[..., 1] - 16.0
    lab[..., 1] = 500.0 * (f[..., 0] - f[..., 1])
    lab[..., 2] = 200.0 * (f[..., 1] - f[..., 2])
    return RasterImage(data=lab, space="lab")


def compute_gradient(img: RasterImage) -> GradientField:
    """Central-difference gradient of the L channel (one-sided at borders)."""
    if img.space != "lab":
        raise ValueError("compute_gradient expects a Lab image")
    lum = img.data[..., 0]
    gx = np.empty_like(lum)
    gy = np.empty_like(lum)
    gx[:, 1:-1] = (lum[:, 2:] - lum[:, :-2]) * 0.5
    gx[:, 0] = lum[:, 1] - lum[:, 0] if lum.shape[1] > 1 else 0.0
    gx[:, -1] = lum[:, -1] - lum[:, -2] if lum.shape[1] > 1 else 0.0
    gy[1:-1, :] = (lum[2:, :] - lum[:-2, :]) * 0.5
    gy[0, :] = lum[1, :] - lum[0, :] if lum.shape[0] > 1 else 0.0
    gy[-1, :] = lum[-1, :] - lum[-2, :] if lum.shape[0] > 1 else 0.0
    vectors = np.stack([gx, gy], axis=-1)
    return GradientField(vectors=vectors, magnitude=np.hypot(gx, gy))


# ---------------------------------------------------------------------------
# Edge detection
# ---------------------------------------------------------------------------

def _gaussian_kernel1d(sigma: float) -> np.ndarray:
    radius = max(1, int(round(4.0 * sigma)))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-0.5 * (x / sigma) ** 2)
    return k / k.sum()


def _smooth(field: np.ndarray, sigma: float) -> np.ndarray:
    if sigma <= 0:
        return field.astype(np.float64, copy=True)
    k = _gaussian_kernel1d(sigma)
    r = len(k) // 2
    out = field.astype(np.float64)
    padded = np.pad(out, ((r, r), (0, 0)), mode="reflect")
    out = np.zeros_like(field, dtype=np.float64)
    for i, kv in enumerate(k):
        out += kv * padded[i : i + field.shape[0], :]
    padded = np.pad(out, ((0, 0), (r, r)), mode="reflect")
    out = np.zeros_like(field, dtype=np.float64)
    for i, kv in enumerate(k):
        out += kv * padded[:, i : i + field.shape[1]]
    return out


def _sobel(field: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p = np.pad(field, 1, mode="reflect")
    gx = (
        (p[:-2, 2:] - p[:-2, :-2])
        + 2.0 * (p[1:-1, 2:] - p[1:-1, :-2])
        + (p[2:, 2:] - p[2:, :-2])
    )
    gy = (
        (p[2:, :-2] - p[:-2, :-2])
        + 2.0 * (p[2:, 1:-1] - p[:-2, 1:-1])
        + (p[2:, 2:] - p[:-2, 2:])
    )
    return gx, gy


def _shifted(arr: np.ndarray, dx: int, dy: int) -> np.ndarray:
    """arr sampled at (x+dx, y+dy), zero outside."""
    h, w = arr.shape
    out = np.zeros_like(arr)
    ys_src = slice(max(dy, 0), h + min(dy, 0))
    xs_src = slice(max(dx, 0), w + min(dx, 0))
    ys_dst = slice(max(-dy, 0), h + min(-dy, 0))
    xs_dst = slice(max(-dx, 0), w + min(-dx, 0))
    out[ys_dst, xs_dst] = arr[ys_src, xs_src]
    return out


_NMS_OFFSETS = {0: (1, 0), 1: (1, 1), 2: (0, 1), 3: (-1, 1)}


def _non_maximum_suppression(mag: np.ndarray, gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    angle = np.mod(np.arctan2(gy, gx), np.pi)
    sector = np.floor(angle / (np.pi / 4.0) + 0.5).astype(np.int64) % 4
    keep = np.zeros(mag.shape, dtype=bool)
    for s, (dx, dy) in _NMS_OFFSETS.items():
        n_plus = _shifted(mag, dx, dy)
        n_minus = _shifted(mag, -dx, -dy)
        # strict on the + side, loose on the - side: a flat 2-wide ridge
        # keeps exactly one pixel
        keep |= (sector == s) & (mag > n_plus) & (mag >= n_minus)
    keep &= mag > 0
    return keep


def _hysteresis(mag: np.ndarray, keep: np.ndarray, low: float, high: float) -> np.ndarray:
    weak = keep & (mag >= low)
    strong = keep & (mag >= high)
    current = strong.copy()
    while True:
        grown = current.copy()
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                if dx == 0 and dy == 0:
                    continue
                grown |= _shifted(current, dx, dy)
        grown &= weak
        if np.array_equal(grown, current):
            return current
        current = grown


def _thin_blocks(edges: np.ndarray, mag: np.ndarray) -> np.ndarray:
    """Remove pixels until no 2x2 block holds 3+ edge pixels (1-px-wide edges)."""
    e = edges.copy()
    while True:
        counts = (
            e[:-1, :-1].astype(np.int8)
            + e[:-1, 1:]
            + e[1:, :-1]
            + e[1:, 1:]
        )
        bad = np.argwhere(counts >= 3)
        if len(bad) == 0:
            return e
        for by, bx in bad:
            block = [(by + dy, bx + dx) for dy in (0, 1) for dx in (0, 1)]
            members = [(y, x) for (y, x) in block if e[y, x]]
            if len(members) < 3:
                continue
            # drop the weakest pixel; ties resolved by scan order
            drop = min(members, key=lambda yx: (mag[yx[0], yx[1]], yx[0], yx[1]))
            e[drop[0], drop[1]] = False


_TRACE_ORDER = ((0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1))


def _trace_chains(mask: np.ndarray) -> tuple[list[np.ndarray], list[bool], np.ndarray, np.ndarray]:
    h, w = mask.shape
    chain_id = np.full((h, w), -1, dtype=np.int32)
    chain_pos = np.full((h, w), -1, dtype=np.int32)
    neighbor_cache: dict[tuple[int, int], list[tuple[int, int]]] = {}

    def neighbors(y: int, x: int) -> list[tuple[int, int]]:
        key = (y, x)
        got = neighbor_cache.get(key)
        if got is None:
            got = [
                (y + dy, x + dx)
                for dx, dy in _TRACE_ORDER
                if 0 <= y + dy < h and 0 <= x + dx < w and mask[y + dy, x + dx]
            ]
            neighbor_cache[key] = got
        return got

    ys, xs = np.nonzero(mask)
    degree: dict[tuple[int, int], int] = {}
    for y, x in zip(ys.tolist(), xs.tolist()):
        degree[(y, x)] = len(neighbors(y, x))

    visited = np.zeros((h, w), dtype=bool)
    chains: list[np.ndarray] = []
    closed: list[bool] = []

    def walk(start: tuple[int, int]) -> list[tuple[int, int]]:
        path = [start]
        visited[start] = True
        current = start
        while True:
            nxt = None
            for cand in neighbors(*current):
                if not visited[cand]:
                    nxt = cand
                    break
            if nxt is None:
                return path
            visited[nxt] = True
            path.append(nxt)
            current = nxt

    # open contours first: start from endpoints (degree 1) in scan order
    order = sorted(degree)
    for start in order:
        if degree[start] == 1 and not visited[start]:
            path = walk(start)
            _store_chain(chains, closed, chain_id, chain_pos, path, neighbors)
    # what is left are loops and junction remnants
    for start in order:
        if not visited[start]:
            path = walk(start)
            _store_chain(chains, closed, chain_id, chain_pos, path, neighbors)
    return chains, closed, chain_id, chain_pos


def _store_chain(chains, closed, chain_id, chain_pos, path, neighbors) -> None:
    cid = len(chains)
    arr = np.array([(x, y) for (y, x) in path], dtype=np.int32)
    chains.append(arr)
    is_closed = len(path) > 2 and path[0] in neighbors(*path[-1])
    closed.append(is_closed)
    for pos, (y, x) in enumerate(path):
        chain_id[y, x] = cid
        chain_pos[y, x] = pos


def detect_edges(img: RasterImage, low: float, high: float, sigma: float = 1.4) -> EdgeMap:
    """One-pixel-wide edges of the L channel, chained into contours."""
    if img.space != "lab":
        raise ValueError("detect_edges expects a Lab image")
    if not 0.0 <= low < high:
        raise ValueError("need 0 <= low < high")
    smoothed = _smooth(img.data[..., 0], sigma)
    gx, gy = _sobel(smoothed)
    mag = np.hypot(gx, gy)
    keep = _non_maximum_suppression(mag, gx, gy)
    edges = _hysteresis(mag, keep, low, high)
    edges = _thin_blocks(edges, mag)
    chains, closed, chain_id, chain_pos = _trace_chains(edges)
    return EdgeMap(mask=edges, chains=chains, chain_id=chain_id, chain_pos=chain_pos, closed=closed)


# ---------------------------------------------------------------------------
# Curve extraction and normals
# ---------------------------------------------------------------------------

def extract_curve(edges: EdgeMap, anchor, p: int) -> Curve | None:
    """Lift a p-sample curve centred at ``anchor`` from its contour chain.

    Walks p/2 of arc length along the chain in each direction, then
    resamples uniformly so the interpolated midpoint is the anchor.
    Returns None when the contour through the anchor is too short.
    """
    if p < 3:
        raise ValueError("p must be >= 3")
    x, y = int(anchor[0]), int(anchor[1])
    if edges.chain_id is None or not (0 <= y < edges.mask.shape[0] and 0 <= x < edges.mask.shape[1]):
        raise ValueError(f"anchor {anchor} outside the image")
    cid = int(edges.chain_id[y, x])
    if cid < 0:
        raise ValueError(f"anchor {anchor} is not an edge pixel")
    curves = extract_curves_batch(edges, cid, np.array([edges.chain_pos[y, x]]), p)
    return curves[0]


def extract_curves_batch(
    edges: EdgeMap, cid: int, positions: np.ndarray, p: int
) -> list[Curve | None]:
    """extract_curve for many anchors on one chain (shared interpolant)."""
    chain = edges.chains[cid].astype(np.float64)
    arcs = edges.chain_arcs(cid)
    half = p / 2.0
    is_closed = edges.closed[cid]

    if is_closed and len(chain) > 2:
        closing = math.hypot(
            chain[0, 0] - chain[-1, 0], chain[0, 1] - chain[-1, 1]
        )
        perimeter = arcs[-1] + closing
        if perimeter < p:
            return [None] * len(positions)
        # unroll one period on both sides so any window fits
        xs = np.concatenate([chain[:, 0], chain[:, 0], chain[:, 0]])
        ys = np.concatenate([chain[:, 1], chain[:, 1], chain[:, 1]])
        ss = np.concatenate([arcs - perimeter, arcs, arcs + perimeter])
        anchor_arc = arcs[positions] + 0.0
        lo = anchor_arc - half
        hi = anchor_arc + half
        valid = np.ones(len(positions), dtype=bool)
    else:
        xs, ys, ss = chain[:, 0], chain[:, 1], arcs
        anchor_arc = arcs[positions]
        lo = anchor_arc - half
        hi = anchor_arc + half
        valid = (lo >= -1e-9) & (hi <= arcs[-1] + 1e-9)

    out: list[Curve | None] = []
    alphas = np.arange(p, dtype=np.float64) / (p - 1)
    for i, pos in enumerate(positions):
        if not valid[i]:
            out.append(None)
            continue
        targets = lo[i] + alphas * (hi[i] - lo[i])
        sx = np.interp(targets, ss, xs)
        sy = np.interp(targets, ss, ys)
        anchor_pt = (float(chain[pos, 0]), float(chain[pos, 1]))
        out.append(Curve(anchor=anchor_pt, samples=np.column_stack([sx, sy])))
    return out


def curve_normals(curve: Curve) -> Curve:
    """Fill unit normals: rotate the central-difference tangent by +90 deg,
    then fix signs so the field is continuous along the curve."""
    pts = curve.samples
    if len(pts) < 3:
        raise ValueError("need at least 3 samples for normals")
    tangents = np.empty_like(pts)
    tangents[1:-1] = pts[2:] - pts[:-2]
    tangents[0] = pts[1] - pts[0]
    tangents[-1] = pts[-1] - pts[-2]
    norms = np.hypot(tangents[:, 0], tangents[:, 1])
    if np.any(norms < 1e-12):
        raise ValueError("degenerate curve: repeated samples")
    normals = np.column_stack([-tangents[:, 1], tangents[:, 0]]) / norms[:, None]
    # sign continuity: no flips between adjacent samples
    dots = np.einsum("ij,ij->i", normals[1:], normals[:-1])
    signs = np.where(dots < 0.0, -1.0, 1.0)
    flip = np.concatenate([[1.0], np.cumprod(signs)])
    normals *= flip[:, None]
    return Curve(anchor=curve.anchor, samples=pts, normals=normals)
