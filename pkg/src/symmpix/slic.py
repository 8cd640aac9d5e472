"""Symmetry-preserving superpixel clustering.

The k-means-style loop extends plain SLIC with paired centers: whenever a
pixel wins assignment to a paired center, its reflection is written to the
partner center unconditionally, so paired superpixels stay mirror images.
Centers update to the arithmetic mean of their pixels, which preserves the
mirror identity of paired centers exactly (the mean of a reflected set is
the reflection of the mean); each pair's transform is then refreshed from
the updated centers.

Determinism contract: centers are processed left-side, right-side, then
unpaired, each in ascending index; windows scan y-outer/x-inner; equal
distances keep the earlier (lower-index) center; mirror writes are
unconditional, so the later write wins conflicts.  Colors are snapped to a
2^-20 grid at entry so color means are exact sums and bit-reproducible
across independent implementations of the same contract.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from symmpix import kernels
from symmpix.clustering import build_pair_graph, extract_cliques, split_lr
from symmpix.config import PipelineConfig
from symmpix.geometry import (
    ReflectionTransform,
    convex_hull,
    points_in_hull,
    reflect_point,
    reflect_points,
    reflection_from_pair,
)
from symmpix.image import GradientField, RasterImage, compute_gradient, rgb_to_lab
from symmpix.pairs import PairDetection, detect_pairs

__all__ = [
    "CenterSet",
    "PairLink",
    "SuperpixelPairing",
    "AssignmentState",
    "LabelMap",
    "SegmentationResult",
    "BudgetPlan",
    "superpixel_budget",
    "symmetric_init",
    "slic_distance",
    "assign_iteration",
    "update_centers",
    "run_symmetric_slic",
    "enforce_connectivity",
    "quantize_lab",
]

_COLOR_QUANTUM = float(2**20)


def quantize_lab(lab: np.ndarray) -> np.ndarray:
    """Snap Lab values to a 2^-20 grid: sums of a few thousand snapped
    values are exact in float64, making color means order-independent."""
    return np.round(lab * _COLOR_QUANTUM) / _COLOR_QUANTUM


@dataclass
class PairLink:
    """One mirror pair of centers (indices into the center arrays)."""

    left: int
    right: int
    transform: ReflectionTransform
    active: bool = True
    demoted_reason: str | None = None


@dataclass
class SuperpixelPairing:
    links: list[PairLink] = field(default_factory=list)

    def active_links(self) -> list[PairLink]:
        return [ln for ln in self.links if ln.active]

    def paired_label_map(self) -> dict[int, int]:
        """label -> partner label over active pairs."""
        out: dict[int, int] = {}
        for ln in self.active_links():
            out[ln.left] = ln.right
            out[ln.right] = ln.left
        return out


@dataclass
class CenterSet:
    """Superpixel centers: positions (x, y), Lab colors, partner links."""

    pos: np.ndarray  # (K, 2) float64
    color: np.ndarray  # (K, 3) float64
    partner: np.ndarray  # (K,) int32, -1 when unpaired
    side: np.ndarray  # (K,) int8: 0 unpaired, 1 left, 2 right

    @property
    def n_centers(self) -> int:
        return len(self.pos)

    def copy(self) -> "CenterSet":
        return CenterSet(self.pos.copy(), self.color.copy(), self.partner.copy(), self.side.copy())


@dataclass
class AssignmentState:
    labels: np.ndarray  # (h, w) int32, -1 unassigned
    dist: np.ndarray  # (h, w) float64, inf unassigned
    iteration: int = 0
    last_wins: np.ndarray | None = None
    last_drops: np.ndarray | None = None


@dataclass
class LabelMap:
    """Final per-pixel superpixel ids plus the pairing relation."""

    labels: np.ndarray  # (h, w) int32
    pairing: SuperpixelPairing

    @property
    def n_labels(self) -> int:
        return int(self.labels.max()) + 1 if self.labels.size else 0


@dataclass
class IterationDiag:
    iteration: int
    mean_displacement: float
    pair_stats: list[dict]


@dataclass
class SegmentationResult:
    label_map: LabelMap
    centers: CenterSet
    diagnostics: list[IterationDiag]
    detection: PairDetection | None = None


# ---------------------------------------------------------------------------
# Initialization
# ---------------------------------------------------------------------------

@dataclass
class BudgetPlan:
    grid_positions: np.ndarray  # (s, 2) float64 centers outside the hull
    s: int
    pair_budget: int
    grid_step: float


def _grid_positions(w: int, h: int, k: int) -> tuple[np.ndarray, float]:
    g = math.sqrt(w * h / k)
    nx = max(1, int(round(w / g)))
    ny = max(1, int(round(h / g)))
    xs = (np.arange(nx) + 0.5) * (w / nx)
    ys = (np.arange(ny) + 0.5) * (h / ny)
    gx, gy = np.meshgrid(xs, ys)
    return np.column_stack([gx.ravel(), gy.ravel()]), g


def superpixel_budget(w: int, h: int, k: int, hull: np.ndarray, n_pairs: int) -> BudgetPlan:
    """Split the k-center budget between the grid outside the symmetric
    region's hull and mirror pairs inside it.

    s grid squares have centers outside the hull; the remaining k - s
    centers come from (k - s) // 2 pairs (selected, or synthesized when
    there are not enough detected pairs).
    """
    if k < 4:
        raise ValueError("k must be >= 4")
    grid, g = _grid_positions(w, h, k)
    if len(hull) >= 3:
        outside = ~points_in_hull(grid, hull)
    else:
        outside = np.ones(len(grid), dtype=bool)
    grid_out = grid[outside]
    s = len(grid_out)
    pair_budget = max(0, (k - s) // 2)
    return BudgetPlan(grid_positions=grid_out, s=s, pair_budget=pair_budget, grid_step=g)


_RELOC_RADIUS = 3  # half-side of the relocation search window


def _relocate_pair(a, transform, gradmag, w, h):
    """Move a pair off its edge: search a (2r+1)^2 window around the left
    endpoint for the offset minimizing total gradient magnitude at both
    (exactly mirrored) endpoints."""
    best = None
    best_cost = math.inf
    for dy in range(-_RELOC_RADIUS, _RELOC_RADIUS + 1):
        for dx in range(-_RELOC_RADIUS, _RELOC_RADIUS + 1):
            ax = a[0] + dx
            ay = a[1] + dy
            bxy = reflect_point(transform, (ax, ay))
            bx, by = float(bxy[0]), float(bxy[1])
            rax, ray = int(math.floor(ax + 0.5)), int(math.floor(ay + 0.5))
            rbx, rby = int(math.floor(bx + 0.5)), int(math.floor(by + 0.5))
            if not (0 <= rax < w and 0 <= ray < h and 0 <= rbx < w and 0 <= rby < h):
                continue
            if math.hypot(ax - bx, ay - by) < 1.0:
                continue  # would collapse the pair onto its axis
            cost = gradmag[ray, rax] + gradmag[rby, rbx]
            if cost < best_cost:
                best_cost = cost
                best = ((float(ax), float(ay)), (bx, by))
    return best


def symmetric_init(
    lab: np.ndarray,
    links: list,
    k: int,
    grad: GradientField,
    seed: int,
) -> tuple[CenterSet, SuperpixelPairing]:
    """Place k centers: mirror pairs inside the symmetric region's hull
    (relocated off edges, exactly mirrored), plain grid outside.

    ``links`` comes from split_lr: (left_pixel, right_pixel, transform,
    cluster_id) per pair.  ``lab`` must already be quantized.
    """
    h, w, _ = lab.shape
    pts = []
    for lpx, rpx, _t, _c in links:
        pts.append(lpx)
        pts.append(rpx)
    hull = convex_hull(np.array(pts, dtype=np.float64)) if pts else np.empty((0, 2))
    plan = superpixel_budget(w, h, k, hull, n_pairs=len(links))

    rng = np.random.default_rng(seed)
    if len(links) > plan.pair_budget:
        sel_idx = np.sort(rng.choice(len(links), size=plan.pair_budget, replace=False))
        selected = [links[int(i)] for i in sel_idx]
    else:
        selected = list(links)

    deficit = plan.pair_budget - len(selected)
    if deficit > 0 and len(links) > 0 and len(hull) >= 3:
        mids = np.array(
            [((l[0][0] + l[1][0]) * 0.5, (l[0][1] + l[1][1]) * 0.5) for l in links]
        )
        x0, y0 = hull.min(axis=0)
        x1, y1 = hull.max(axis=0)
        attempts = 0
        while deficit > 0 and attempts < 200 * plan.pair_budget:
            attempts += 1
            p = np.array([rng.uniform(x0, x1), rng.uniform(y0, y1)])
            if not points_in_hull(p[None, :], hull)[0]:
                continue
            near = int(np.argmin(np.einsum("ij,ij->i", mids - p, mids - p)))
            t = links[near][2]
            q = reflect_point(t, p)
            if not (0 <= q[0] <= w - 1 and 0 <= q[1] <= h - 1):
                continue
            if math.hypot(p[0] - q[0], p[1] - q[1]) < 1.0:
                continue
            a, b = (float(p[0]), float(p[1])), (float(q[0]), float(q[1]))
            if b < a:
                a, b = b, a
                t = reflection_from_pair(a, b)
            selected.append((a, b, t, links[near][3]))
            deficit -= 1

    # relocate each pair to the local gradient minimum, keeping exact mirrors
    placed = []
    for lpx, rpx, t, _c in selected:
        spot = _relocate_pair((float(lpx[0]), float(lpx[1])), t, grad.magnitude, w, h)
        if spot is None:
            continue
        placed.append((spot[0], spot[1], t))

    n_centers = 2 * len(placed) + len(plan.grid_positions)
    pos = np.zeros((n_centers, 2))
    color = np.zeros((n_centers, 3))
    partner = np.full(n_centers, -1, dtype=np.int32)
    side = np.zeros(n_centers, dtype=np.int8)
    pairing = SuperpixelPairing()

    for p_idx, (apos, bpos, t) in enumerate(placed):
        li, ri = 2 * p_idx, 2 * p_idx + 1
        pos[li] = apos
        pos[ri] = bpos
        partner[li] = ri
        partner[ri] = li
        side[li] = 1
        side[ri] = 2
        pairing.links.append(PairLink(left=li, right=ri, transform=t))
    base = 2 * len(placed)
    for g_idx, gp in enumerate(plan.grid_positions):
        pos[base + g_idx] = gp

    for idx in range(n_centers):
        x = int(math.floor(pos[idx, 0] + 0.5))
        y = int(math.floor(pos[idx, 1] + 0.5))
        x = min(max(x, 0), w - 1)
        y = min(max(y, 0), h - 1)
        color[idx] = lab[y, x]

    return CenterSet(pos=pos, color=color, partner=partner, side=side), pairing


# ---------------------------------------------------------------------------
# Assignment and update
# ---------------------------------------------------------------------------

def slic_distance(x, pixel_color, center_pos, center_color, lam: float) -> float:
    """Squared spatial plus lam-weighted squared color distance."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    dx = float(x[0]) - float(center_pos[0])
    dy = float(x[1]) - float(center_pos[1])
    dl = float(pixel_color[0]) - float(center_color[0])
    da = float(pixel_color[1]) - float(center_color[1])
    db = float(pixel_color[2]) - float(center_color[2])
    return dx * dx + dy * dy + lam * ((dl * dl + da * da) + db * db)


def _pair_matrices(centers: CenterSet, pairing: SuperpixelPairing) -> tuple[np.ndarray, np.ndarray]:
    k = centers.n_centers
    mat = np.zeros((k, 4))
    tvec = np.zeros((k, 2))
    for ln in pairing.active_links():
        m = ln.transform.matrix
        row = (m[0, 0], m[0, 1], m[1, 0], m[1, 1])
        for idx in (ln.left, ln.right):
            mat[idx] = row
            tvec[idx] = ln.transform.t
    return mat, tvec


def assign_iteration(
    state: AssignmentState,
    centers: CenterSet,
    pairing: SuperpixelPairing,
    lab: np.ndarray,
    s: float,
    lam: float,
) -> AssignmentState:
    """One fresh assignment sweep (distance and label maps are reset, then
    every center claims pixels in its 2s x 2s window per the contract)."""
    state.dist.fill(np.inf)
    state.labels.fill(-1)
    k = centers.n_centers
    drops = np.zeros(k, dtype=np.int64)
    wins = np.zeros(k, dtype=np.int64)
    mat, tvec = _pair_matrices(centers, pairing)
    kernels.assign_pass(
        lab,
        state.dist,
        state.labels,
        centers.pos,
        centers.color,
        centers.partner,
        centers.side,
        mat,
        tvec,
        float(s),
        float(lam),
        drops,
        wins,
    )
    state.iteration += 1
    state.last_drops = drops
    state.last_wins = wins
    return state


def update_centers(
    state: AssignmentState,
    centers: CenterSet,
    pairing: SuperpixelPairing,
    lab: np.ndarray,
) -> tuple[CenterSet, np.ndarray, np.ndarray]:
    """Means of assigned pixels (position and color); empty clusters keep
    their previous center and are flagged.  Returns (new_centers,
    counts, empty_mask)."""
    k = centers.n_centers
    flat = state.labels.ravel()
    assigned = flat >= 0
    ids = flat[assigned]
    h, w = state.labels.shape
    ys, xs = np.divmod(np.nonzero(assigned)[0], w)
    counts = np.bincount(ids, minlength=k).astype(np.int64)
    sum_x = np.bincount(ids, weights=xs, minlength=k)
    sum_y = np.bincount(ids, weights=ys, minlength=k)
    labf = lab.reshape(-1, 3)[assigned]
    sum_l = np.bincount(ids, weights=labf[:, 0], minlength=k)
    sum_a = np.bincount(ids, weights=labf[:, 1], minlength=k)
    sum_b = np.bincount(ids, weights=labf[:, 2], minlength=k)

    new = centers.copy()
    nonzero = counts > 0
    denom = np.maximum(counts, 1).astype(np.float64)
    new.pos[nonzero, 0] = (sum_x / denom)[nonzero]
    new.pos[nonzero, 1] = (sum_y / denom)[nonzero]
    new.color[nonzero, 0] = (sum_l / denom)[nonzero]
    new.color[nonzero, 1] = (sum_a / denom)[nonzero]
    new.color[nonzero, 2] = (sum_b / denom)[nonzero]
    return new, counts, ~nonzero


def _refresh_transforms(centers: CenterSet, pairing: SuperpixelPairing) -> None:
    """Recompute each active pair's transform from its current centers."""
    for ln in pairing.active_links():
        a = centers.pos[ln.left]
        b = centers.pos[ln.right]
        if math.hypot(a[0] - b[0], a[1] - b[1]) < 1e-9:
            ln.active = False
            ln.demoted_reason = "degenerate-centers"
            centers.partner[ln.left] = -1
            centers.partner[ln.right] = -1
            centers.side[ln.left] = 0
            centers.side[ln.right] = 0
            continue
        ln.transform = reflection_from_pair(a, b)


def _fill_unlabeled(state: AssignmentState, centers: CenterSet, lab: np.ndarray, lam: float) -> None:
    """Assign leftover pixels (covered by no window) to the closest center."""
    mask = state.labels < 0
    if not mask.any():
        return
    ys, xs = np.nonzero(mask)
    cols = lab[ys, xs]
    block = 4096
    for lo in range(0, len(xs), block):
        sl = slice(lo, lo + block)
        dx = xs[sl, None] - centers.pos[None, :, 0]
        dy = ys[sl, None] - centers.pos[None, :, 1]
        dl = cols[sl, 0:1] - centers.color[None, :, 0]
        da = cols[sl, 1:2] - centers.color[None, :, 1]
        db = cols[sl, 2:3] - centers.color[None, :, 2]
        d = dx * dx + dy * dy + lam * ((dl * dl + da * da) + db * db)
        best = np.argmin(d, axis=1)
        state.labels[ys[sl], xs[sl]] = best.astype(np.int32)
        state.dist[ys[sl], xs[sl]] = d[np.arange(len(best)), best]


# ---------------------------------------------------------------------------
# Connectivity post-processing
# ---------------------------------------------------------------------------

def _region_connected(coords: set[tuple[int, int]], seeds: list[tuple[int, int]]) -> bool:
    """True when every coordinate is 4-reachable from the seed set."""
    if not coords:
        return True
    todo = [s for s in seeds if s in coords]
    if not todo:
        return False
    seen = set(todo)
    while todo:
        y, x = todo.pop()
        for ny, nx in ((y - 1, x), (y + 1, x), (y, x - 1), (y, x + 1)):
            if (ny, nx) in coords and (ny, nx) not in seen:
                seen.add((ny, nx))
                todo.append((ny, nx))
    return len(seen) == len(coords)


def enforce_connectivity(
    label_map: LabelMap,
    min_size: float,
    n_labels: int | None = None,
) -> LabelMap:
    """Make every label 4-connected.

    Per pass: the largest component of each label is its core; other
    components either get a fresh (unpaired) label when at least min_size
    pixels, or merge into the largest adjacent superpixel.  A merge into a
    paired superpixel is mirrored into the partner when the mirrored region
    stays in-bounds and keeps the partner connected; otherwise the pair is
    demoted to unpaired.  Passes repeat until no orphan remains.
    """
    labels = label_map.labels.copy()
    pairing = label_map.pairing
    h, w = labels.shape
    if n_labels is None:
        n_labels = int(labels.max()) + 1

    for _ in range(64):
        comp, ncomp = kernels.label_components(labels)
        flat_comp = comp.ravel()
        flat_lab = labels.ravel()
        sizes = np.bincount(flat_comp, minlength=ncomp)
        comp_label = np.full(ncomp, -1, dtype=np.int64)
        comp_label[flat_comp] = flat_lab

        core: dict[int, int] = {}
        for c in range(ncomp):
            lbl = int(comp_label[c])
            best = core.get(lbl)
            if best is None or sizes[c] > sizes[best]:
                core[lbl] = c
        orphans = [c for c in range(ncomp) if core[int(comp_label[c])] != c]
        if not orphans:
            break

        order = np.argsort(flat_comp, kind="stable")
        starts = np.searchsorted(flat_comp[order], np.arange(ncomp + 1))
        label_sizes = np.bincount(flat_lab, minlength=max(n_labels, labels.max() + 1)).astype(np.int64)
        paired = pairing.paired_label_map()
        link_of = {ln.left: ln for ln in pairing.active_links()}
        link_of.update({ln.right: ln for ln in pairing.active_links()})

        for c in orphans:
            pix = order[starts[c] : starts[c + 1]]
            ys, xs = np.divmod(pix, w)
            own = int(comp_label[c])

            def _debit_current(ys=ys, xs=xs) -> None:
                prev_vals = labels[ys, xs]
                for lbl_prev, cnt in zip(*np.unique(prev_vals, return_counts=True)):
                    label_sizes[int(lbl_prev)] -= int(cnt)

            if sizes[c] >= min_size:
                if n_labels >= len(label_sizes):
                    grow = np.zeros(n_labels - len(label_sizes) + 1, dtype=np.int64)
                    label_sizes = np.concatenate([label_sizes, grow])
                _debit_current()
                labels[ys, xs] = n_labels
                label_sizes[n_labels] += len(pix)
                n_labels += 1
                continue
            neigh: set[int] = set()
            for dy, dx in ((-1, 0), (1, 0), (0, -1), (0, 1)):
                ny = ys + dy
                nx = xs + dx
                ok = (ny >= 0) & (ny < h) & (nx >= 0) & (nx < w)
                neigh.update(int(v) for v in np.unique(labels[ny[ok], nx[ok]]))
            neigh.discard(own)
            if not neigh:
                continue
            target = max(neigh, key=lambda lbl: (label_sizes[lbl], -lbl))
            _debit_current()
            labels[ys, xs] = target
            label_sizes[target] += len(pix)

            if target in paired:
                ln = link_of[target]
                partner_lbl = paired[target]
                ref = reflect_points(ln.transform, np.column_stack([xs, ys]).astype(np.float64))
                mx = np.floor(ref[:, 0] + 0.5).astype(np.int64)
                my = np.floor(ref[:, 1] + 0.5).astype(np.int64)
                inb = (mx >= 0) & (mx < w) & (my >= 0) & (my < h)
                if not inb.all():
                    ln.active = False
                    ln.demoted_reason = "merge-out-of-bounds"
                    continue
                pys, pxs = np.nonzero(labels == partner_lbl)
                union = set(zip(pys.tolist(), pxs.tolist()))
                union.update(zip(my.tolist(), mx.tolist()))
                seeds = list(zip(pys.tolist(), pxs.tolist())) or list(zip(my.tolist(), mx.tolist()))
                if _region_connected(union, seeds[:1]):
                    prev = labels[my, mx]
                    for lbl_prev, cnt in zip(*np.unique(prev, return_counts=True)):
                        label_sizes[int(lbl_prev)] -= int(cnt)
                    labels[my, mx] = partner_lbl
                    label_sizes[partner_lbl] += len(mx)
                else:
                    ln.active = False
                    ln.demoted_reason = "merge-disconnects-partner"
    return LabelMap(labels=labels, pairing=pairing)


# ---------------------------------------------------------------------------
# Full pipeline
# ---------------------------------------------------------------------------

def run_symmetric_slic(
    img: RasterImage,
    cfg: PipelineConfig | None = None,
    detection: PairDetection | None = None,
    links: list | None = None,
) -> SegmentationResult:
    """Detect mirror pairs, cluster them by axis, then run the symmetric
    superpixel loop until centers settle.

    ``detection`` or pre-split ``links`` can be injected (tests, tooling);
    by default both come from the configured pipeline.  Deterministic for a
    fixed config and seed.
    """
    cfg = (cfg or PipelineConfig()).validated()
    lab_img = rgb_to_lab(img) if img.space == "rgb" else img
    lab = quantize_lab(lab_img.data)
    h, w, _ = lab.shape
    grad = compute_gradient(lab_img)

    if links is None:
        if detection is None:
            detection = detect_pairs(img, cfg)
        pairs = detection.pairs
        if len(pairs) > cfg.max_graph_vertices:
            pairs = sorted(pairs, key=lambda p: (-p.score, p.i, p.j))[: cfg.max_graph_vertices]
            pairs.sort(key=lambda p: (p.i, p.j))
        if len(pairs) >= 2:
            graph = build_pair_graph(pairs, cfg.tau)
            clusters = extract_cliques(graph, cfg.n_axes)
            clusters = [c for c in clusters if len(c.members) >= cfg.min_cluster_size]
        else:
            clusters = []
        _l, _r, links = split_lr(clusters)

    centers, pairing = symmetric_init(lab, links, cfg.k, grad, cfg.seed)
    if centers.n_centers == 0:
        raise RuntimeError("initialization produced no centers")

    state = AssignmentState(
        labels=np.full((h, w), -1, dtype=np.int32),
        dist=np.full((h, w), np.inf),
    )
    s = math.sqrt(w * h / cfg.k)
    diagnostics: list[IterationDiag] = []

    for _ in range(cfg.max_iters):
        _refresh_transforms(centers, pairing)
        used_transforms = {id(ln): ln.transform for ln in pairing.active_links()}
        assign_iteration(state, centers, pairing, lab, s, cfg.compactness)
        new_centers, counts, empty = update_centers(state, centers, pairing, lab)

        disp = np.hypot(
            new_centers.pos[:, 0] - centers.pos[:, 0],
            new_centers.pos[:, 1] - centers.pos[:, 1],
        )
        mean_disp = float(np.mean(disp))

        pair_stats = []
        for ln in pairing.active_links():
            t_used = used_transforms[id(ln)]
            mirrored = reflect_point(t_used, new_centers.pos[ln.left])
            residual = float(
                math.hypot(
                    mirrored[0] - new_centers.pos[ln.right, 0],
                    mirrored[1] - new_centers.pos[ln.right, 1],
                )
            )
            pair_stats.append(
                {
                    "left": ln.left,
                    "right": ln.right,
                    "size_left": int(counts[ln.left]),
                    "size_right": int(counts[ln.right]),
                    "drops": int(state.last_drops[ln.left] + state.last_drops[ln.right]),
                    "wins": int(state.last_wins[ln.left] + state.last_wins[ln.right]),
                    "residual": residual,
                }
            )
        diagnostics.append(
            IterationDiag(iteration=state.iteration, mean_displacement=mean_disp, pair_stats=pair_stats)
        )

        # demote pairs bleeding too many mirror writes out of bounds
        for ln, st in zip(pairing.active_links(), pair_stats):
            if st["wins"] > 0 and st["drops"] / st["wins"] > cfg.oob_demote_frac:
                ln.active = False
                ln.demoted_reason = "out-of-bounds-drops"
                centers.partner[ln.left] = -1
                centers.partner[ln.right] = -1
                centers.side[ln.left] = 0
                centers.side[ln.right] = 0
                new_centers.partner[ln.left] = -1
                new_centers.partner[ln.right] = -1
                new_centers.side[ln.left] = 0
                new_centers.side[ln.right] = 0

        if empty.any():
            warnings.warn(f"{int(empty.sum())} empty superpixels kept previous centers", RuntimeWarning, stacklevel=2)
        centers = new_centers
        if mean_disp < cfg.conv_tol:
            break

    _fill_unlabeled(state, centers, lab, cfg.compactness)
    label_map = LabelMap(labels=state.labels.copy(), pairing=pairing)
    label_map = enforce_connectivity(label_map, min_size=(w * h / cfg.k) / 4.0, n_labels=centers.n_centers)
    return SegmentationResult(
        label_map=label_map,
        centers=centers,
        diagnostics=diagnostics,
        detection=detection,
    )
