"""Pure-Python/numpy versions of the hot kernels.

Same signatures and semantics as the compiled ``_kernels`` module; used when
the extension is not built or ``CWNET_BACKEND=python`` is set.
"""
from __future__ import annotations

import math

import numpy as np

EPS = 2.0 ** -52
TWO_PI = 2.0 * math.pi


def householder_tridiagonal(a):
    """Reduce a Hermitian matrix to real symmetric tridiagonal form.

    Returns ``(d, e, zt)`` with ``a = Z T Z*``, where ``T`` has diagonal ``d``
    and sub/superdiagonal ``e[:n-1]`` (``e[n-1] == 0``) and ``zt`` is ``Z``
    transposed (row ``j`` holds column ``j`` of ``Z``).
    """
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    q = np.eye(n, dtype=complex)
    for k in range(n - 2):
        x = a[k + 1:, k].copy()
        tail = np.linalg.norm(x[1:])
        if tail == 0.0:
            continue
        sigma = math.hypot(abs(x[0]), tail)
        phase = x[0] / abs(x[0]) if abs(x[0]) > 0 else 1.0
        alpha = -phase * sigma
        v = x
        v[0] -= alpha
        tau = 2.0 / np.vdot(v, v).real
        sub = a[k + 1:, k + 1:]
        p = tau * (sub @ v)
        kk = 0.5 * tau * np.vdot(v, p)
        w = p - kk * v
        sub -= np.outer(v, w.conj()) + np.outer(w, v.conj())
        a[k + 1:, k] = 0.0
        a[k, k + 1:] = 0.0
        a[k + 1, k] = alpha
        a[k, k + 1] = np.conj(alpha)
        qs = q[:, k + 1:]
        qs -= tau * np.outer(qs @ v, v.conj())

    d = a.diagonal().real.copy()
    e = np.zeros(n)
    s = np.ones(n, dtype=complex)
    for k in range(n - 1):
        c = a[k + 1, k]
        mag = abs(c)
        e[k] = mag
        s[k + 1] = s[k] * (c / mag) if mag > 0 else s[k]
    zt = np.ascontiguousarray((q * s[None, :]).T)
    return d, e, zt


def tql_implicit(d, e, zt, max_iter):
    """Implicit-shift QL on a symmetric tridiagonal matrix, in place.

    ``e[i]`` couples ``d[i]`` and ``d[i+1]``. Rotations are accumulated into
    the rows of ``zt``. Returns the number of iterations used, or ``-1`` if
    ``max_iter`` was exceeded.
    """
    n = d.shape[0]
    if n == 0:
        return 0
    e[n - 1] = 0.0
    f = 0.0
    tst1 = 0.0
    total = 0
    for l in range(n):
        tst1 = max(tst1, abs(d[l]) + abs(e[l]))
        m = l
        while m < n - 1 and abs(e[m]) > EPS * tst1:
            m += 1
        if m > l:
            while True:
                total += 1
                if total > max_iter:
                    return -1
                g = d[l]
                p = (d[l + 1] - g) / (2.0 * e[l])
                r = math.hypot(p, 1.0)
                if p < 0:
                    r = -r
                d[l] = e[l] / (p + r)
                d[l + 1] = e[l] * (p + r)
                dl1 = d[l + 1]
                h = g - d[l]
                d[l + 2:] -= h
                f += h
                p = d[m]
                c = c2 = c3 = 1.0
                el1 = e[l + 1]
                s = s2 = 0.0
                for i in range(m - 1, l - 1, -1):
                    c3 = c2
                    c2 = c
                    s2 = s
                    g = c * e[i]
                    h = c * p
                    r = math.hypot(p, e[i])
                    e[i + 1] = s * r
                    s = e[i] / r
                    c = p / r
                    p = c * d[i] - s * g
                    d[i + 1] = h + s * (c * g + s * d[i])
                    zi = zt[i].copy()
                    zt[i] = c * zi - s * zt[i + 1]
                    zt[i + 1] = s * zi + c * zt[i + 1]
                p = -s * s2 * c3 * el1 * e[l] / dl1
                e[l] = s * p
                d[l] = c * p
                if abs(e[l]) <= EPS * tst1:
                    break
        d[l] += f
        e[l] = 0.0
    return total


def _circ_zero(x, tol):
    r = math.fmod(x, TWO_PI)
    if r < 0:
        r += TWO_PI
    return min(r, TWO_PI - r) <= tol


def cycle_flags(adj, phase, tol):
    """Test every simple cycle of the skeleton against both balance notions.

    Each cycle is visited once, in the orientation that starts at its smallest
    node and whose second node is smaller than its last. Returns
    ``(balanced, antibalanced, n_cycles_examined)``; enumeration stops early
    once both flags are false.
    """
    n = adj.shape[0]
    nbrs = [[j for j in range(n) if adj[i, j]] for i in range(n)]
    state = {"bal": True, "anti": True, "count": 0}
    on_path = [False] * n
    path = []

    def dfs(s, v, acc):
        for w in nbrs[v]:
            if not (state["bal"] or state["anti"]):
                return
            if w == s:
                if len(path) >= 3 and path[1] < path[-1]:
                    total = acc + phase[v, s]
                    state["count"] += 1
                    if state["bal"] and not _circ_zero(total, tol):
                        state["bal"] = False
                    if state["anti"] and not _circ_zero(total + len(path) * math.pi, tol):
                        state["anti"] = False
            elif w > s and not on_path[w]:
                on_path[w] = True
                path.append(w)
                dfs(s, w, acc + phase[v, w])
                path.pop()
                on_path[w] = False

    for s in range(n):
        on_path[s] = True
        path.append(s)
        dfs(s, s, 0.0)
        path.pop()
        on_path[s] = False
        if not (state["bal"] or state["anti"]):
            break
    return state["bal"], state["anti"], state["count"]


def _assign(points, centers):
    d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    labels = np.argmin(d2, axis=1)
    best = d2[np.arange(points.shape[0]), labels]
    return labels, best


def lloyd(points, centers, max_iter, tol):
    """Lloyd iterations from the given initial centers.

    Returns ``(labels, centers, inertia, n_iter)``. An empty cluster is
    reseeded with the point farthest from its current center.
    """
    points = np.ascontiguousarray(points, dtype=float)
    centers = np.array(centers, dtype=float)
    k = centers.shape[0]
    prev_labels = None
    prev_inertia = math.inf
    it = 0
    while True:
        labels, best = _assign(points, centers)
        inertia = float(best.sum())
        if prev_labels is not None and (
                np.array_equal(labels, prev_labels)
                or prev_inertia - inertia <= tol * prev_inertia):
            break
        if it >= max_iter:
            break
        it += 1
        new = np.zeros_like(centers)
        counts = np.bincount(labels, minlength=k)
        np.add.at(new, labels, points)
        for c in range(k):
            if counts[c] > 0:
                new[c] /= counts[c]
            else:
                far = int(np.argmax(best))
                new[c] = points[far]
                best[far] = 0.0
        centers = new
        prev_labels = labels
        prev_inertia = inertia
    return labels.astype(np.intp), centers, inertia, it
