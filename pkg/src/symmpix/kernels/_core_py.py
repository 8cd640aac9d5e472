"""Pure-Python kernels, semantically identical to the compiled core.

These are the reference semantics: the Cython module mirrors the exact
arithmetic expressions and iteration orders used here, so both backends
produce bit-identical outputs.  Keep the two files in sync.

Shared conventions:

* the assignment pass processes centers in three phases -- paired left
  (side == 1), paired right (side == 2), unpaired (side == 0) -- each in
  ascending center index, scanning windows row by row (y outer, x inner);
* distances are d = dx*dx + dy*dy + lam*((dl*dl + da*da) + db*db);
* mirror targets round as floor(coord + 0.5) in both coordinates.
"""

from __future__ import annotations

import math

import numpy as np


def assign_pass(lab, dist, labels, pos, col, partner, side, mat, tvec, s, lam, drops, wins):
    """One symmetric assignment sweep over all centers.

    Paired centers mirror every win into the partner label unconditionally;
    out-of-bounds mirror targets are counted in ``drops``.  Unpaired centers
    run the plain windowed nearest-center update.  Mutates dist/labels/
    drops/wins in place.
    """
    h, w, _ = lab.shape
    n_centers = len(pos)
    for phase in (1, 2, 0):
        for k in range(n_centers):
            if side[k] != phase:
                continue
            cx = pos[k, 0]
            cy = pos[k, 1]
            x0 = int(math.ceil(cx - s))
            x1 = int(math.floor(cx + s))
            y0 = int(math.ceil(cy - s))
            y1 = int(math.floor(cy + s))
            if x0 < 0:
                x0 = 0
            if y0 < 0:
                y0 = 0
            if x1 > w - 1:
                x1 = w - 1
            if y1 > h - 1:
                y1 = h - 1
            if x0 > x1 or y0 > y1:
                continue
            if phase == 0:
                _plain_window(lab, dist, labels, pos, col, wins, k, x0, x1, y0, y1, lam)
            else:
                _paired_window(
                    lab, dist, labels, pos, col, partner, mat, tvec,
                    drops, wins, k, x0, x1, y0, y1, lam, w, h,
                )


def _plain_window(lab, dist, labels, pos, col, wins, k, x0, x1, y0, y1, lam):
    # vectorized, but elementwise identical to the scalar loop: numpy applies
    # the same IEEE ops per element and the window has one candidate per pixel
    cx = pos[k, 0]
    cy = pos[k, 1]
    cl = col[k, 0]
    ca = col[k, 1]
    cb = col[k, 2]
    win = lab[y0 : y1 + 1, x0 : x1 + 1]
    dx = np.arange(x0, x1 + 1, dtype=np.float64) - cx
    dy = np.arange(y0, y1 + 1, dtype=np.float64) - cy
    dl = win[:, :, 0] - cl
    da = win[:, :, 1] - ca
    db = win[:, :, 2] - cb
    d = dx[None, :] * dx[None, :] + dy[:, None] * dy[:, None] + lam * ((dl * dl + da * da) + db * db)
    dwin = dist[y0 : y1 + 1, x0 : x1 + 1]
    lwin = labels[y0 : y1 + 1, x0 : x1 + 1]
    sel = d < dwin
    dwin[sel] = d[sel]
    lwin[sel] = k
    wins[k] += int(np.count_nonzero(sel))


def _paired_window(lab, dist, labels, pos, col, partner, mat, tvec, drops, wins,
                   k, x0, x1, y0, y1, lam, w, h):
    cx = pos[k, 0]
    cy = pos[k, 1]
    cl = col[k, 0]
    ca = col[k, 1]
    cb = col[k, 2]
    pk = int(partner[k])
    px = pos[pk, 0]
    py = pos[pk, 1]
    pl = col[pk, 0]
    pa = col[pk, 1]
    pb = col[pk, 2]
    m00 = mat[k, 0]
    m01 = mat[k, 1]
    m10 = mat[k, 2]
    m11 = mat[k, 3]
    tx = tvec[k, 0]
    ty = tvec[k, 1]
    for y in range(y0, y1 + 1):
        yf = float(y)
        dy = yf - cy
        for x in range(x0, x1 + 1):
            xf = float(x)
            dx = xf - cx
            dl = lab[y, x, 0] - cl
            da = lab[y, x, 1] - ca
            db = lab[y, x, 2] - cb
            d = dx * dx + dy * dy + lam * ((dl * dl + da * da) + db * db)
            if d < dist[y, x]:
                dist[y, x] = d
                labels[y, x] = k
                wins[k] += 1
                # mirror write: the reflected pixel goes to the partner
                rx = m00 * (xf - tx) + m01 * (yf - ty) + tx
                ry = m10 * (xf - tx) + m11 * (yf - ty) + ty
                mx = int(math.floor(rx + 0.5))
                my = int(math.floor(ry + 0.5))
                if 0 <= mx < w and 0 <= my < h:
                    mdx = float(mx) - px
                    mdy = float(my) - py
                    mdl = lab[my, mx, 0] - pl
                    mda = lab[my, mx, 1] - pa
                    mdb = lab[my, mx, 2] - pb
                    md = mdx * mdx + mdy * mdy + lam * ((mdl * mdl + mda * mda) + mdb * mdb)
                    dist[my, mx] = md
                    labels[my, mx] = pk
                else:
                    drops[k] += 1


# ---------------------------------------------------------------------------
# Maximum bipartite matching (Hopcroft-Karp with per-phase edge pointers)
# ---------------------------------------------------------------------------

_INF = 1 << 60


def hopcroft_karp(indptr, indices, n_left, n_right):
    """Maximum matching of a bipartite graph in CSR form (left -> right).

    Returns (match_left, match_right) with -1 for unmatched vertices.
    Deterministic: left vertices and CSR edge lists are scanned in order.
    """
    ip = np.asarray(indptr, dtype=np.int64).tolist()
    idx = np.asarray(indices, dtype=np.int64).tolist()
    ml = [-1] * n_left
    mr = [-1] * n_right

    while True:
        dist = [_INF] * n_left
        queue = [u for u in range(n_left) if ml[u] == -1]
        for u in queue:
            dist[u] = 0
        found = False
        qi = 0
        while qi < len(queue):
            u = queue[qi]
            qi += 1
            du = dist[u]
            for e in range(ip[u], ip[u + 1]):
                v = idx[e]
                wv = mr[v]
                if wv == -1:
                    found = True
                elif dist[wv] == _INF:
                    dist[wv] = du + 1
                    queue.append(wv)
        if not found:
            break

        ptr = list(ip[:n_left])
        augmented = 0
        for u0 in range(n_left):
            if ml[u0] != -1:
                continue
            stack = [u0]
            rights: list[int] = []
            while stack:
                u = stack[-1]
                advanced = False
                while ptr[u] < ip[u + 1]:
                    e = ptr[u]
                    ptr[u] += 1
                    v = idx[e]
                    wv = mr[v]
                    if wv == -1:
                        rights.append(v)
                        for i in range(len(stack) - 1, -1, -1):
                            ml[stack[i]] = rights[i]
                            mr[rights[i]] = stack[i]
                        augmented += 1
                        stack = []
                        rights = []
                        advanced = True
                        break
                    if dist[wv] == dist[u] + 1:
                        rights.append(v)
                        stack.append(wv)
                        advanced = True
                        break
                if not advanced:
                    dist[u] = _INF
                    stack.pop()
                    if rights:
                        rights.pop()
        if augmented == 0:
            # stale pointers can starve a phase; finish with plain Kuhn
            _kuhn_finish(ip, idx, ml, mr, n_left)
            break

    return np.array(ml, dtype=np.int64), np.array(mr, dtype=np.int64)


def _kuhn_finish(ip, idx, ml, mr, n_left):
    """Augment with unlayered alternating-path search until maximum."""
    while True:
        augmented = False
        for u0 in range(n_left):
            if ml[u0] != -1:
                continue
            seen = set()
            if _kuhn_try(u0, ip, idx, ml, mr, seen):
                augmented = True
        if not augmented:
            return


def _kuhn_try(u, ip, idx, ml, mr, seen):
    rights: list[int] = []
    cursors = {u: ip[u]}
    order = [u]
    while order:
        cur = order[-1]
        advanced = False
        while cursors[cur] < ip[cur + 1]:
            e = cursors[cur]
            cursors[cur] = e + 1
            v = idx[e]
            if v in seen:
                continue
            seen.add(v)
            wv = mr[v]
            if wv == -1:
                rights.append(v)
                for i in range(len(order) - 1, -1, -1):
                    ml[order[i]] = rights[i]
                    mr[rights[i]] = order[i]
                return True
            rights.append(v)
            order.append(wv)
            cursors[wv] = ip[wv]
            advanced = True
            break
        if not advanced:
            order.pop()
            if rights:
                rights.pop()
    return False


# ---------------------------------------------------------------------------
# Connected components of a label map (4-connectivity)
# ---------------------------------------------------------------------------

def label_components(labels):
    """Component map of equal-label 4-connected regions.

    Components are numbered in discovery order over a row-major scan; BFS
    visits neighbours up, left, right, down.  Returns (comp, n_components).
    """
    labels = np.ascontiguousarray(labels, dtype=np.int32)
    h, w = labels.shape
    comp = np.full((h, w), -1, dtype=np.int32)
    n_comp = 0
    lab_flat = labels.ravel()
    comp_flat = comp.ravel()
    for start in range(h * w):
        if comp_flat[start] != -1:
            continue
        target = lab_flat[start]
        queue = [start]
        comp_flat[start] = n_comp
        qi = 0
        while qi < len(queue):
            p = queue[qi]
            qi += 1
            y, x = divmod(p, w)
            if y > 0:
                q = p - w
                if comp_flat[q] == -1 and lab_flat[q] == target:
                    comp_flat[q] = n_comp
                    queue.append(q)
            if x > 0:
                q = p - 1
                if comp_flat[q] == -1 and lab_flat[q] == target:
                    comp_flat[q] = n_comp
                    queue.append(q)
            if x < w - 1:
                q = p + 1
                if comp_flat[q] == -1 and lab_flat[q] == target:
                    comp_flat[q] = n_comp
                    queue.append(q)
            if y < h - 1:
                q = p + w
                if comp_flat[q] == -1 and lab_flat[q] == target:
                    comp_flat[q] = n_comp
                    queue.append(q)
        n_comp += 1
    return comp, n_comp
