# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Mirrors ``cwnet._fallback`` exactly."""
import numpy as np

from libc.math cimport fabs, sqrt, hypot, fmod, M_PI, INFINITY

cdef double EPS = 2.0 ** -52
cdef double TWO_PI = 2.0 * M_PI


cdef inline double cabs2(double complex z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef inline double complex cconj(double complex z) noexcept nogil:
    return z.real - 1j * z.imag


def householder_tridiagonal(a):
    cdef double complex[:, ::1] A = np.array(a, dtype=complex, order="C")
    cdef Py_ssize_t n = A.shape[0]
    cdef double complex[:, ::1] Q = np.eye(n, dtype=complex)
    cdef double complex[::1] v = np.zeros(n, dtype=complex)
    cdef double complex[::1] p = np.zeros(n, dtype=complex)
    cdef double complex[::1] qv = np.zeros(n, dtype=complex)
    cdef Py_ssize_t k, i, j, m
    cdef double tail, sigma, ax0, tau, vnorm2
    cdef double complex phase, alpha, kk, acc, x0
    with nogil:
        for k in range(n - 2):
            m = n - k - 1
            tail = 0.0
            for i in range(k + 2, n):
                tail += cabs2(A[i, k])
            if tail == 0.0:
                continue
            x0 = A[k + 1, k]
            ax0 = sqrt(cabs2(x0))
            sigma = sqrt(ax0 * ax0 + tail)
            if ax0 > 0:
                phase = x0 / ax0
            else:
                phase = 1.0
            alpha = -phase * sigma
            for i in range(m):
                v[i] = A[k + 1 + i, k]
            v[0] = v[0] - alpha
            vnorm2 = 0.0
            for i in range(m):
                vnorm2 += cabs2(v[i])
            tau = 2.0 / vnorm2
            # p = tau * A_sub v
            for i in range(m):
                acc = 0.0
                for j in range(m):
                    acc = acc + A[k + 1 + i, k + 1 + j] * v[j]
                p[i] = tau * acc
            kk = 0.0
            for i in range(m):
                kk = kk + cconj(v[i]) * p[i]
            kk = 0.5 * tau * kk
            for i in range(m):
                p[i] = p[i] - kk * v[i]
            for i in range(m):
                for j in range(m):
                    A[k + 1 + i, k + 1 + j] = A[k + 1 + i, k + 1 + j] - (
                        v[i] * cconj(p[j]) + p[i] * cconj(v[j]))
            for i in range(k + 1, n):
                A[i, k] = 0.0
                A[k, i] = 0.0
            A[k + 1, k] = alpha
            A[k, k + 1] = cconj(alpha)
            # Q[:, k+1:] -= tau (Q[:, k+1:] v) v*
            for i in range(n):
                acc = 0.0
                for j in range(m):
                    acc = acc + Q[i, k + 1 + j] * v[j]
                qv[i] = tau * acc
            for i in range(n):
                for j in range(m):
                    Q[i, k + 1 + j] = Q[i, k + 1 + j] - qv[i] * cconj(v[j])

    d = np.empty(n)
    e = np.zeros(n)
    s = np.ones(n, dtype=complex)
    cdef double[::1] dv = d
    cdef double[::1] ev = e
    cdef double complex[::1] sv = s
    cdef double mag
    cdef double complex c
    for k in range(n):
        dv[k] = A[k, k].real
    for k in range(n - 1):
        c = A[k + 1, k]
        mag = sqrt(cabs2(c))
        ev[k] = mag
        if mag > 0:
            sv[k + 1] = sv[k] * (c / mag)
        else:
            sv[k + 1] = sv[k]
    zt = np.empty((n, n), dtype=complex)
    cdef double complex[:, ::1] Z = zt
    for i in range(n):
        for j in range(n):
            Z[j, i] = Q[i, j] * sv[j]
    return d, e, zt


def tql_implicit(double[::1] d, double[::1] e, double complex[:, ::1] zt, long max_iter):
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t l, m, i, q
    cdef long total = 0
    cdef double f, tst1, g, p, r, dl1, h, c, c2, c3, el1, s, s2
    cdef double complex zi
    if n == 0:
        return 0
    with nogil:
        e[n - 1] = 0.0
        f = 0.0
        tst1 = 0.0
        for l in range(n):
            tst1 = max(tst1, fabs(d[l]) + fabs(e[l]))
            m = l
            while m < n - 1 and fabs(e[m]) > EPS * tst1:
                m += 1
            if m > l:
                while True:
                    total += 1
                    if total > max_iter:
                        total = -1
                        break
                    g = d[l]
                    p = (d[l + 1] - g) / (2.0 * e[l])
                    r = hypot(p, 1.0)
                    if p < 0:
                        r = -r
                    d[l] = e[l] / (p + r)
                    d[l + 1] = e[l] * (p + r)
                    dl1 = d[l + 1]
                    h = g - d[l]
                    for i in range(l + 2, n):
                        d[i] -= h
                    f += h
                    p = d[m]
                    c = 1.0
                    c2 = 1.0
                    c3 = 1.0
                    el1 = e[l + 1]
                    s = 0.0
                    s2 = 0.0
                    i = m - 1
                    while i >= l:
                        c3 = c2
                        c2 = c
                        s2 = s
                        g = c * e[i]
                        h = c * p
                        r = hypot(p, e[i])
                        e[i + 1] = s * r
                        s = e[i] / r
                        c = p / r
                        p = c * d[i] - s * g
                        d[i + 1] = h + s * (c * g + s * d[i])
                        for q in range(n):
                            zi = zt[i, q]
                            zt[i, q] = c * zi - s * zt[i + 1, q]
                            zt[i + 1, q] = s * zi + c * zt[i + 1, q]
                        i -= 1
                    p = -s * s2 * c3 * el1 * e[l] / dl1
                    e[l] = s * p
                    d[l] = c * p
                    if fabs(e[l]) <= EPS * tst1:
                        break
                if total < 0:
                    break
            d[l] += f
            e[l] = 0.0
    return total


cdef inline bint circ_zero(double x, double tol) noexcept nogil:
    cdef double r = fmod(x, TWO_PI)
    if r < 0:
        r += TWO_PI
    return min(r, TWO_PI - r) <= tol


def cycle_flags(adj, phase, double tol):
    cdef const unsigned char[:, ::1] A = np.ascontiguousarray(adj, dtype=np.uint8)
    cdef const double[:, ::1] P = np.ascontiguousarray(phase, dtype=float)
    cdef Py_ssize_t n = A.shape[0]
    cdef long[::1] path = np.zeros(n + 1, dtype=np.int_)
    cdef long[::1] nxt = np.zeros(n + 1, dtype=np.int_)
    cdef double[::1] acc = np.zeros(n + 1, dtype=float)
    cdef unsigned char[::1] on_path = np.zeros(n, dtype=np.uint8)
    cdef bint bal = True, anti = True
    cdef long count = 0
    cdef Py_ssize_t s, depth, v, w
    cdef double total
    with nogil:
        for s in range(n):
            if not (bal or anti):
                break
            depth = 0
            path[0] = s
            acc[0] = 0.0
            nxt[0] = 0
            on_path[s] = 1
            while depth >= 0:
                if not (bal or anti):
                    break
                v = path[depth]
                w = nxt[depth]
                if w >= n:
                    on_path[v] = 0
                    depth -= 1
                    continue
                nxt[depth] = w + 1
                if not A[v, w]:
                    continue
                if w == s:
                    if depth >= 2 and path[1] < path[depth]:
                        total = acc[depth] + P[v, s]
                        count += 1
                        if bal and not circ_zero(total, tol):
                            bal = False
                        if anti and not circ_zero(total + (depth + 1) * M_PI, tol):
                            anti = False
                elif w > s and not on_path[w]:
                    on_path[w] = 1
                    depth += 1
                    path[depth] = w
                    acc[depth] = acc[depth - 1] + P[v, w]
                    nxt[depth] = 0
            for v in range(n):
                on_path[v] = 0
    return bool(bal), bool(anti), int(count)


def lloyd(points, centers, long max_iter, double tol):
    cdef const double[:, ::1] X = np.ascontiguousarray(points, dtype=float)
    C_arr = np.array(centers, dtype=float, order="C")
    cdef double[:, ::1] C = C_arr
    cdef Py_ssize_t m = X.shape[0], dim = X.shape[1], k = C.shape[0]
    labels_arr = np.zeros(m, dtype=np.intp)
    prev_arr = np.full(m, -1, dtype=np.intp)
    cdef Py_ssize_t[::1] labels = labels_arr
    cdef Py_ssize_t[::1] prev = prev_arr
    cdef double[::1] best = np.zeros(m)
    cdef double[:, ::1] new = np.zeros((k, dim))
    cdef long[::1] counts = np.zeros(k, dtype=np.int_)
    cdef Py_ssize_t i, c, t, far, lab
    cdef double dist, diff, bd, inertia = 0.0, prev_inertia = INFINITY, fv
    cdef long it = 0
    cdef bint first = True, same
    with nogil:
        while True:
            inertia = 0.0
            same = True
            for i in range(m):
                bd = INFINITY
                lab = 0
                for c in range(k):
                    dist = 0.0
                    for t in range(dim):
                        diff = X[i, t] - C[c, t]
                        dist += diff * diff
                    if dist < bd:
                        bd = dist
                        lab = c
                labels[i] = lab
                best[i] = bd
                inertia += bd
                if lab != prev[i]:
                    same = False
            if not first and (same or prev_inertia - inertia <= tol * prev_inertia):
                break
            if it >= max_iter:
                break
            first = False
            it += 1
            for c in range(k):
                counts[c] = 0
                for t in range(dim):
                    new[c, t] = 0.0
            for i in range(m):
                counts[labels[i]] += 1
                for t in range(dim):
                    new[labels[i], t] += X[i, t]
            for c in range(k):
                if counts[c] > 0:
                    for t in range(dim):
                        C[c, t] = new[c, t] / counts[c]
                else:
                    far = 0
                    fv = -1.0
                    for i in range(m):
                        if best[i] > fv:
                            fv = best[i]
                            far = i
                    for t in range(dim):
                        C[c, t] = X[far, t]
                    best[far] = 0.0
            for i in range(m):
                prev[i] = labels[i]
            prev_inertia = inertia
    return labels_arr, C_arr, float(inertia), int(it)
