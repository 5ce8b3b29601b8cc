"""Compiled hot-loop kernels: maximin over index families and clause membership.

Both loops abort a family/clause as soon as it can no longer change the
result, which the pure-numpy fallback cannot do; values are identical.
"""

import numpy as np

from libc.math cimport INFINITY


def maximin_block(double[:, ::1] gvals, int[::1] members, long long[::1] offsets):
    """Per row of gvals (B, N): max over CSR families of the family minimum."""
    cdef Py_ssize_t B = gvals.shape[0]
    cdef Py_ssize_t F = offsets.shape[0] - 1
    out = np.empty(B, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t b, f, k
    cdef long long start, stop
    cdef double best, fam_min, v
    with nogil:
        for b in range(B):
            best = -INFINITY
            for f in range(F):
                start = offsets[f]
                stop = offsets[f + 1]
                fam_min = INFINITY
                for k in range(start, stop):
                    v = gvals[b, members[k]]
                    if v < fam_min:
                        fam_min = v
                        if fam_min <= best:
                            break  # family minimum cannot exceed current best
                if fam_min > best:
                    best = fam_min
            o[b] = best
    return out


def clause_any_all_block(double[:, ::1] slack, int[::1] members,
                         long long[::1] offsets, double tol):
    """Per row of slack (B, H): whether any CSR clause has all slacks <= tol."""
    cdef Py_ssize_t B = slack.shape[0]
    cdef Py_ssize_t C = offsets.shape[0] - 1
    out = np.zeros(B, dtype=np.uint8)
    cdef unsigned char[::1] o = out
    cdef Py_ssize_t b, c, k
    cdef long long start, stop
    cdef bint ok
    with nogil:
        for b in range(B):
            for c in range(C):
                start = offsets[c]
                stop = offsets[c + 1]
                ok = 1
                for k in range(start, stop):
                    if slack[b, members[k]] > tol:
                        ok = 0
                        break
                if ok:
                    o[b] = 1
                    break
    return out.astype(bool)
