# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled force kernels. Semantics match ``_kernels_py``."""

from libc.math cimport sqrt
from libc.stdint cimport int64_t

cdef double COLLINEAR_EPS = 1e-9


cdef inline double _magnitude(double dist, double delta, double cutoff, double weight) nogil:
    cdef double d
    if dist >= cutoff:
        return 0.0
    d = dist if dist > 0.1 * delta else 0.1 * delta
    return weight * delta * (delta / d) * (delta / d)


cdef inline void _point_point(double[:, ::1] pts, Py_ssize_t ia, Py_ssize_t iq,
                              double wa, double wq,
                              double delta, double cutoff, double weight,
                              double[:, ::1] out) nogil:
    cdef double r0 = pts[ia, 0] - pts[iq, 0]
    cdef double r1 = pts[ia, 1] - pts[iq, 1]
    cdef double r2 = pts[ia, 2] - pts[iq, 2]
    cdef double dist = sqrt(r0 * r0 + r1 * r1 + r2 * r2)
    cdef double k
    if dist <= 0.0 or dist >= cutoff:
        return
    k = _magnitude(dist, delta, cutoff, weight) / dist
    out[ia, 0] += wa * k * r0
    out[ia, 1] += wa * k * r1
    out[ia, 2] += wa * k * r2
    out[iq, 0] -= wq * k * r0
    out[iq, 1] -= wq * k * r1
    out[iq, 2] -= wq * k * r2


def repulsion(double[:, ::1] pts, const int64_t[::1] seg_a, const int64_t[::1] seg_b,
              const double[::1] seg_w, const double[::1] pt_w, double end_share,
              const int64_t[::1] pi, const int64_t[::1] sj,
              double delta, double cutoff, double weight, double[:, ::1] out):
    cdef Py_ssize_t k, n = pi.shape[0]
    cdef Py_ssize_t ia, ic, id_
    cdef double v0, v1, v2, w0, w1, w2, l2, s, r0, r1, r2, dist, mag, ws, wp
    with nogil:
        for k in range(n):
            ia = pi[k]
            ic = seg_a[sj[k]]
            id_ = seg_b[sj[k]]
            ws = seg_w[sj[k]]
            wp = pt_w[ia]
            v0 = pts[id_, 0] - pts[ic, 0]
            v1 = pts[id_, 1] - pts[ic, 1]
            v2 = pts[id_, 2] - pts[ic, 2]
            w0 = pts[ia, 0] - pts[ic, 0]
            w1 = pts[ia, 1] - pts[ic, 1]
            w2 = pts[ia, 2] - pts[ic, 2]
            l2 = v0 * v0 + v1 * v1 + v2 * v2
            if l2 > 0.0:
                s = (w0 * v0 + w1 * v1 + w2 * v2) / l2
                r0 = w0 - s * v0
                r1 = w1 - s * v1
                r2 = w2 - s * v2
                dist = sqrt(r0 * r0 + r1 * r1 + r2 * r2)
                if s >= 0.0 and s <= 1.0 and dist > COLLINEAR_EPS * delta:
                    if dist < cutoff:
                        mag = _magnitude(dist, delta, cutoff, weight) / dist
                        r0 *= mag
                        r1 *= mag
                        r2 *= mag
                        out[ia, 0] += ws * r0
                        out[ia, 1] += ws * r1
                        out[ia, 2] += ws * r2
                        out[ic, 0] -= wp * (1.0 - s) * r0
                        out[ic, 1] -= wp * (1.0 - s) * r1
                        out[ic, 2] -= wp * (1.0 - s) * r2
                        out[id_, 0] -= wp * s * r0
                        out[id_, 1] -= wp * s * r1
                        out[id_, 2] -= wp * s * r2
                    continue
            _point_point(pts, ia, ic, end_share * ws, end_share * wp, delta, cutoff, weight, out)
            _point_point(pts, ia, id_, end_share * ws, end_share * wp, delta, cutoff, weight, out)


cdef inline void _cut(double[:, ::1] pts, Py_ssize_t i0, Py_ssize_t i1, double t, double* res) nogil:
    cdef double u = (t - pts[i0, 2]) / (pts[i1, 2] - pts[i0, 2])
    res[0] = pts[i0, 0] + u * (pts[i1, 0] - pts[i0, 0])
    res[1] = pts[i0, 1] + u * (pts[i1, 1] - pts[i0, 1])


cdef inline void _contract(double* x, double* y, double delta, double weight, double* res) nogil:
    cdef double d0 = y[0] - x[0]
    cdef double d1 = y[1] - x[1]
    cdef double dist = sqrt(d0 * d0 + d1 * d1)
    cdef double k
    if dist > delta:
        k = weight * (dist - delta) / dist
        res[0] = k * d0
        res[1] = k * d1
    else:
        res[0] = 0.0
        res[1] = 0.0


cdef inline void _share(double[:, ::1] pts, Py_ssize_t i0, Py_ssize_t i1, double f, double g,
                        double* ff, double* fg, double sign, bint lever,
                        double[:, ::1] out) nogil:
    cdef double length = pts[i1, 2] - pts[i0, 2]
    cdef double cov = (g - f) / length
    cdef double wf = (f - pts[i0, 2]) / length
    cdef double wg = (g - pts[i0, 2]) / length
    cdef int k
    if lever:
        wf = 1.0 - wf
        wg = 1.0 - wg
    for k in range(2):
        out[i0, k] += sign * cov * (wf * ff[k] + wg * fg[k])
        out[i1, k] += sign * cov * ((1.0 - wf) * ff[k] + (1.0 - wg) * fg[k])


def attraction(double[:, ::1] pts, const int64_t[::1] ia, const int64_t[::1] ib,
               const int64_t[::1] ic, const int64_t[::1] id_,
               const double[::1] f, const double[::1] g,
               double delta, double weight, bint lever, double[:, ::1] out):
    cdef Py_ssize_t k, n = ia.shape[0]
    cdef double m[2]
    cdef double nn[2]
    cdef double p[2]
    cdef double q[2]
    cdef double fm[2]
    cdef double fn[2]
    with nogil:
        for k in range(n):
            _cut(pts, ia[k], ib[k], f[k], m)
            _cut(pts, ia[k], ib[k], g[k], nn)
            _cut(pts, ic[k], id_[k], f[k], p)
            _cut(pts, ic[k], id_[k], g[k], q)
            _contract(m, p, delta, weight, fm)
            _contract(nn, q, delta, weight, fn)
            _share(pts, ia[k], ib[k], f[k], g[k], fm, fn, 1.0, lever, out)
            _share(pts, ic[k], id_[k], f[k], g[k], fm, fn, -1.0, lever, out)


def simplify_mask(double[:, ::1] pts, removable, double threshold):
    import numpy as np
    cdef Py_ssize_t n = pts.shape[0]
    keep_arr = np.ones(n, dtype=np.uint8)
    rem_arr = np.ascontiguousarray(removable, dtype=np.uint8)
    cdef unsigned char[::1] keep = keep_arr
    cdef const unsigned char[::1] rem = rem_arr
    cdef Py_ssize_t i, j, last = -1
    cdef double d0, d1, d2, t2 = threshold * threshold
    with nogil:
        for i in range(1, n - 1):
            if not rem[i]:
                continue
            j = i - 1 if keep[i - 1] else last
            d0 = pts[i + 1, 0] - pts[j, 0]
            d1 = pts[i + 1, 1] - pts[j, 1]
            d2 = pts[i + 1, 2] - pts[j, 2]
            if d0 * d0 + d1 * d1 + d2 * d2 < t2:
                keep[i] = 0
                last = j
    return keep_arr.astype(bool)
