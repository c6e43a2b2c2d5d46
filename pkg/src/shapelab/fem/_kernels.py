"""P1 element integrals and Jacobi-preconditioned CG, numba and numpy variants."""

from __future__ import annotations

import numpy as np

from .._accel import njit, pick


@njit
def element_triplets_numba(vertices, triangles):
    m = triangles.shape[0]
    rows = np.empty(9 * m, dtype=np.int64)
    cols = np.empty(9 * m, dtype=np.int64)
    kvals = np.empty(9 * m)
    mvals = np.empty(9 * m)
    loads = np.zeros(vertices.shape[0])
    ex = np.empty(3)
    ey = np.empty(3)
    for t in range(m):
        i0 = triangles[t, 0]
        i1 = triangles[t, 1]
        i2 = triangles[t, 2]
        # edge opposite vertex a runs from vertex a+1 to vertex a+2
        ex[0] = vertices[i2, 0] - vertices[i1, 0]
        ey[0] = vertices[i2, 1] - vertices[i1, 1]
        ex[1] = vertices[i0, 0] - vertices[i2, 0]
        ey[1] = vertices[i0, 1] - vertices[i2, 1]
        ex[2] = vertices[i1, 0] - vertices[i0, 0]
        ey[2] = vertices[i1, 1] - vertices[i0, 1]
        area = 0.5 * (ex[2] * (-ey[1]) - (-ex[1]) * ey[2])
        inv4a = 1.0 / (4.0 * area)
        for a in range(3):
            ia = triangles[t, a]
            loads[ia] += area / 3.0
            for b in range(3):
                p = 9 * t + 3 * a + b
                rows[p] = ia
                cols[p] = triangles[t, b]
                kvals[p] = (ex[a] * ex[b] + ey[a] * ey[b]) * inv4a
                mvals[p] = area / 6.0 if a == b else area / 12.0
    return rows, cols, kvals, mvals, loads


def element_triplets_numpy(vertices, triangles):
    p = vertices[triangles]  # (m, 3, 2)
    e = np.roll(p, -2, axis=1) - np.roll(p, -1, axis=1)  # e[:, a] = p[a+2] - p[a+1]
    area = 0.5 * (e[:, 2, 0] * (-e[:, 1, 1]) + e[:, 1, 0] * e[:, 2, 1])
    kloc = np.einsum("mac,mbc->mab", e, e) / (4.0 * area)[:, None, None]
    mloc = (area / 12.0)[:, None, None] * (np.ones((3, 3)) + np.eye(3))[None]
    rows = np.repeat(triangles, 3, axis=1).ravel()
    cols = np.tile(triangles, (1, 3)).ravel()
    loads = np.bincount(triangles.ravel(), weights=np.repeat(area / 3.0, 3), minlength=len(vertices))
    return rows, cols, kloc.ravel(), mloc.ravel(), loads


element_triplets = pick(element_triplets_numba, element_triplets_numpy)


def edge_triplets(vertices, edges):
    """Boundary mass ``length/6 * [[2,1],[1,2]]`` per edge (cheap, numpy only)."""
    d = vertices[edges[:, 1]] - vertices[edges[:, 0]]
    length = np.hypot(d[:, 0], d[:, 1])
    rows = np.repeat(edges, 2, axis=1).ravel()
    cols = np.tile(edges, (1, 2)).ravel()
    loc = (length / 6.0)[:, None, None] * (np.ones((2, 2)) + np.eye(2))[None]
    return rows, cols, loc.ravel()


@njit
def pcg_numba(indptr, indices, data, rhs, x0, tol, maxiter):
    n = rhs.shape[0]
    dinv = np.empty(n)
    for i in range(n):
        dii = 0.0
        for p in range(indptr[i], indptr[i + 1]):
            if indices[p] == i:
                dii = data[p]
        dinv[i] = 1.0 / dii
    x = x0.copy()
    r = np.empty(n)
    for i in range(n):
        acc = 0.0
        for p in range(indptr[i], indptr[i + 1]):
            acc += data[p] * x[indices[p]]
        r[i] = rhs[i] - acc
    bnorm = 0.0
    for i in range(n):
        bnorm += rhs[i] * rhs[i]
    bnorm = np.sqrt(bnorm)
    if bnorm == 0.0:
        return np.zeros(n), 0, 0.0
    z = r * dinv
    pvec = z.copy()
    rz = 0.0
    rr = 0.0
    for i in range(n):
        rz += r[i] * z[i]
        rr += r[i] * r[i]
    if np.sqrt(rr) <= tol * bnorm:
        return x, 0, np.sqrt(rr) / bnorm
    q = np.empty(n)
    it = 0
    while it < maxiter:
        it += 1
        pq = 0.0
        for i in range(n):
            acc = 0.0
            for p in range(indptr[i], indptr[i + 1]):
                acc += data[p] * pvec[indices[p]]
            q[i] = acc
            pq += pvec[i] * acc
        alpha = rz / pq
        rr = 0.0
        for i in range(n):
            x[i] += alpha * pvec[i]
            r[i] -= alpha * q[i]
            rr += r[i] * r[i]
        if np.sqrt(rr) <= tol * bnorm:
            break
        rz_new = 0.0
        for i in range(n):
            z[i] = r[i] * dinv[i]
            rz_new += r[i] * z[i]
        beta = rz_new / rz
        rz = rz_new
        for i in range(n):
            pvec[i] = z[i] + beta * pvec[i]
    return x, it, np.sqrt(rr) / bnorm


def pcg_numpy(indptr, indices, data, rhs, x0, tol, maxiter):
    from scipy.sparse import csr_matrix

    n = rhs.shape[0]
    K = csr_matrix((data, indices, indptr), shape=(n, n))
    dinv = 1.0 / K.diagonal()
    bnorm = np.linalg.norm(rhs)
    if bnorm == 0.0:
        return np.zeros(n), 0, 0.0
    x = x0.copy()
    r = rhs - K @ x
    z = dinv * r
    p = z.copy()
    rz = r @ z
    rnorm = np.linalg.norm(r)
    it = 0
    while rnorm > tol * bnorm and it < maxiter:
        it += 1
        q = K @ p
        alpha = rz / (p @ q)
        x += alpha * p
        r -= alpha * q
        rnorm = np.linalg.norm(r)
        if rnorm <= tol * bnorm:
            break
        z = dinv * r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    return x, it, rnorm / bnorm


pcg = pick(pcg_numba, pcg_numpy)
