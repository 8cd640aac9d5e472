# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels. Mirrors _core_py.py exactly: same arithmetic expression
trees, same iteration orders, same rounding (floor(x + 0.5)).  Both backends
must stay bit-identical; change them together."""

import numpy as np

cimport numpy as cnp
from libc.math cimport ceil, floor

cnp.import_array()


def assign_pass(
    double[:, :, ::1] lab,
    double[:, ::1] dist,
    cnp.int32_t[:, ::1] labels,
    double[:, ::1] pos,
    double[:, ::1] col,
    cnp.int32_t[::1] partner,
    cnp.int8_t[::1] side,
    double[:, ::1] mat,
    double[:, ::1] tvec,
    double s,
    double lam,
    cnp.int64_t[::1] drops,
    cnp.int64_t[::1] wins,
):
    """One symmetric assignment sweep; see _core_py.assign_pass."""
    cdef Py_ssize_t h = lab.shape[0]
    cdef Py_ssize_t w = lab.shape[1]
    cdef Py_ssize_t n_centers = pos.shape[0]
    cdef int phase_i
    cdef int phase
    cdef Py_ssize_t k, x, y, x0, x1, y0, y1, pk, mx, my
    cdef double cx, cy, cl, ca, cb, px, py, pl, pa, pb
    cdef double m00, m01, m10, m11, tx, ty
    cdef double xf, yf, dx, dy, dl, da, db, d
    cdef double rx, ry, mdx, mdy, mdl, mda, mdb, md
    cdef int[3] phases
    phases[0] = 1
    phases[1] = 2
    phases[2] = 0

    for phase_i in range(3):
        phase = phases[phase_i]
        for k in range(n_centers):
            if side[k] != phase:
                continue
            cx = pos[k, 0]
            cy = pos[k, 1]
            x0 = <Py_ssize_t>ceil(cx - s)
            x1 = <Py_ssize_t>floor(cx + s)
            y0 = <Py_ssize_t>ceil(cy - s)
            y1 = <Py_ssize_t>floor(cy + s)
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
            cl = col[k, 0]
            ca = col[k, 1]
            cb = col[k, 2]
            if phase == 0:
                for y in range(y0, y1 + 1):
                    yf = <double>y
                    dy = yf - cy
                    for x in range(x0, x1 + 1):
                        xf = <double>x
                        dx = xf - cx
                        dl = lab[y, x, 0] - cl
                        da = lab[y, x, 1] - ca
                        db = lab[y, x, 2] - cb
                        d = dx * dx + dy * dy + lam * ((dl * dl + da * da) + db * db)
                        if d < dist[y, x]:
                            dist[y, x] = d
                            labels[y, x] = <cnp.int32_t>k
                            wins[k] += 1
            else:
                pk = partner[k]
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
                    yf = <double>y
                    dy = yf - cy
                    for x in range(x0, x1 + 1):
                        xf = <double>x
                        dx = xf - cx
                        dl = lab[y, x, 0] - cl
                        da = lab[y, x, 1] - ca
                        db = lab[y, x, 2] - cb
                        d = dx * dx + dy * dy + lam * ((dl * dl + da * da) + db * db)
                        if d < dist[y, x]:
                            dist[y, x] = d
                            labels[y, x] = <cnp.int32_t>k
                            wins[k] += 1
                            rx = m00 * (xf - tx) + m01 * (yf - ty) + tx
                            ry = m10 * (xf - tx) + m11 * (yf - ty) + ty
                            mx = <Py_ssize_t>floor(rx + 0.5)
                            my = <Py_ssize_t>floor(ry + 0.5)
                            if 0 <= mx < w and 0 <= my < h:
                                mdx = (<double>mx) - px
                                mdy = (<double>my) - py
                                mdl = lab[my, mx, 0] - pl
                                mda = lab[my, mx, 1] - pa
                                mdb = lab[my, mx, 2] - pb
                                md = mdx * mdx + mdy * mdy + lam * ((mdl * mdl + mda * mda) + mdb * mdb)
                                dist[my, mx] = md
                                labels[my, mx] = <cnp.int32_t>pk
                            else:
                                drops[k] += 1


# ---------------------------------------------------------------------------
# Hopcroft-Karp maximum bipartite matching
# ---------------------------------------------------------------------------

cdef cnp.int64_t LAYER_INF = 0x7FFFFFFFFFFFFFF


def hopcroft_karp(indptr, indices, Py_ssize_t n_left, Py_ssize_t n_right):
    """Maximum matching of a CSR bipartite graph; see _core_py.hopcroft_karp."""
    cdef cnp.int64_t[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef cnp.int64_t[::1] idx = np.ascontiguousarray(indices, dtype=np.int64)
    ml_arr = np.full(n_left, -1, dtype=np.int64)
    mr_arr = np.full(n_right, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] ml = ml_arr
    cdef cnp.int64_t[::1] mr = mr_arr
    dist_arr = np.empty(n_left, dtype=np.int64)
    queue_arr = np.empty(n_left, dtype=np.int64)
    ptr_arr = np.empty(n_left, dtype=np.int64)
    stack_arr = np.empty(n_left + 1, dtype=np.int64)
    rights_arr = np.empty(n_left + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] dist = dist_arr
    cdef cnp.int64_t[::1] queue = queue_arr
    cdef cnp.int64_t[::1] ptr = ptr_arr
    cdef cnp.int64_t[::1] stack = stack_arr
    cdef cnp.int64_t[::1] rights = rights_arr

    cdef Py_ssize_t u, u0, v, wv, e, qi, qn, sp, rp, i
    cdef cnp.int64_t du
    cdef bint found, advanced
    cdef Py_ssize_t augmented

    while True:
        qn = 0
        for u in range(n_left):
            if ml[u] == -1:
                dist[u] = 0
                queue[qn] = u
                qn += 1
            else:
                dist[u] = LAYER_INF
        found = False
        qi = 0
        while qi < qn:
            u = queue[qi]
            qi += 1
            du = dist[u]
            for e in range(ip[u], ip[u + 1]):
                v = idx[e]
                wv = mr[v]
                if wv == -1:
                    found = True
                elif dist[wv] == LAYER_INF:
                    dist[wv] = du + 1
                    queue[qn] = wv
                    qn += 1
        if not found:
            break

        for u in range(n_left):
            ptr[u] = ip[u]
        augmented = 0
        for u0 in range(n_left):
            if ml[u0] != -1:
                continue
            sp = 1
            stack[0] = u0
            rp = 0
            while sp > 0:
                u = stack[sp - 1]
                advanced = False
                while ptr[u] < ip[u + 1]:
                    e = ptr[u]
                    ptr[u] += 1
                    v = idx[e]
                    wv = mr[v]
                    if wv == -1:
                        rights[rp] = v
                        rp += 1
                        for i in range(sp - 1, -1, -1):
                            ml[stack[i]] = rights[i]
                            mr[rights[i]] = stack[i]
                        augmented += 1
                        sp = 0
                        rp = 0
                        advanced = True
                        break
                    if dist[wv] == dist[u] + 1:
                        rights[rp] = v
                        rp += 1
                        stack[sp] = wv
                        sp += 1
                        advanced = True
                        break
                if not advanced:
                    dist[u] = LAYER_INF
                    sp -= 1
                    if rp > 0:
                        rp -= 1
        if augmented == 0:
            _kuhn_finish(ip, idx, ml, mr, n_left, n_right)
            break

    return ml_arr, mr_arr


cdef void _kuhn_finish(
    cnp.int64_t[::1] ip,
    cnp.int64_t[::1] idx,
    cnp.int64_t[::1] ml,
    cnp.int64_t[::1] mr,
    Py_ssize_t n_left,
    Py_ssize_t n_right,
):
    seen_arr = np.zeros(n_right, dtype=np.int8)
    cursor_arr = np.empty(n_left, dtype=np.int64)
    order_arr = np.empty(n_right + 2, dtype=np.int64)
    rights_arr = np.empty(n_right + 2, dtype=np.int64)
    cdef cnp.int8_t[::1] seen = seen_arr
    cdef cnp.int64_t[::1] cursor = cursor_arr
    cdef cnp.int64_t[::1] order = order_arr
    cdef cnp.int64_t[::1] rights = rights_arr
    cdef Py_ssize_t u0, u, v, wv, e, sp, rp, i
    cdef bint augmented_any, advanced, done

    while True:
        augmented_any = False
        for u0 in range(n_left):
            if ml[u0] != -1:
                continue
            seen_arr[:] = 0
            sp = 1
            order[0] = u0
            cursor[u0] = ip[u0]
            rp = 0
            done = False
            while sp > 0 and not done:
                u = order[sp - 1]
                advanced = False
                while cursor[u] < ip[u + 1]:
                    e = cursor[u]
                    cursor[u] = e + 1
                    v = idx[e]
                    if seen[v]:
                        continue
                    seen[v] = 1
                    wv = mr[v]
                    if wv == -1:
                        rights[rp] = v
                        rp += 1
                        for i in range(sp - 1, -1, -1):
                            ml[order[i]] = rights[i]
                            mr[rights[i]] = order[i]
                        augmented_any = True
                        done = True
                        advanced = True
                        break
                    rights[rp] = v
                    rp += 1
                    order[sp] = wv
                    sp += 1
                    cursor[wv] = ip[wv]
                    advanced = True
                    break
                if not advanced:
                    sp -= 1
                    if rp > 0:
                        rp -= 1
        if not augmented_any:
            return


# ---------------------------------------------------------------------------
# Connected components (4-connectivity) of a label map
# ---------------------------------------------------------------------------

def label_components(labels):
    """Equal-label 4-connected components; see _core_py.label_components."""
    lab_arr = np.ascontiguousarray(labels, dtype=np.int32)
    cdef cnp.int32_t[:, ::1] lab = lab_arr
    cdef Py_ssize_t h = lab.shape[0]
    cdef Py_ssize_t w = lab.shape[1]
    comp_arr = np.full((h, w), -1, dtype=np.int32)
    cdef cnp.int32_t[:, ::1] comp = comp_arr
    queue_arr = np.empty(h * w, dtype=np.int64)
    cdef cnp.int64_t[::1] queue = queue_arr
    cdef cnp.int32_t[::1] lab_flat = lab_arr.ravel()
    cdef cnp.int32_t[::1] comp_flat = comp_arr.ravel()
    cdef Py_ssize_t start, p, q, y, x, qi, qn
    cdef cnp.int32_t target
    cdef cnp.int32_t n_comp = 0

    for start in range(h * w):
        if comp_flat[start] != -1:
            continue
        target = lab_flat[start]
        qn = 0
        queue[qn] = start
        qn += 1
        comp_flat[start] = n_comp
        qi = 0
        while qi < qn:
            p = queue[qi]
            qi += 1
            y = p // w
            x = p - y * w
            if y > 0:
                q = p - w
                if comp_flat[q] == -1 and lab_flat[q] == target:
                    comp_flat[q] = n_comp
                    queue[qn] = q
                    qn += 1
            if x > 0:
                q = p - 1
                if comp_flat[q] == -1 and lab_flat[q] == target:
                    comp_flat[q] = n_comp
                    queue[qn] = q
                    qn += 1
            if x < w - 1:
                q = p + 1
                if comp_flat[q] == -1 and lab_flat[q] == target:
                    comp_flat[q] = n_comp
                    queue[qn] = q
                    qn += 1
            if y < h - 1:
                q = p + w
                if comp_flat[q] == -1 and lab_flat[q] == target:
                    comp_flat[q] = n_comp
                    queue[qn] = q
                    qn += 1
        n_comp += 1
    return comp_arr, int(n_comp)
