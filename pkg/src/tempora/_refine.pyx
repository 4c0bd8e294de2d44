# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled transfer kernels; same contract as ``_refine_py``."""

import numpy as np
cimport numpy as cnp

ctypedef cnp.int32_t i32
ctypedef cnp.uint8_t u8


cdef inline bint _holds(u8[:, :] R, Py_ssize_t i, const i32[:] cptr, const i32[:] optr,
                        const i32[:] obl_a, const i32[:] sptr, const i32[:] set_b) nogil:
    cdef Py_ssize_t c, o, s
    cdef bint good, hit
    for c in range(cptr[i], cptr[i + 1]):
        good = True
        for o in range(optr[c], optr[c + 1]):
            hit = False
            for s in range(sptr[o], sptr[o + 1]):
                if R[obl_a[o], set_b[s]]:
                    hit = True
                    break
            if not hit:
                good = False
                break
        if good:
            return True
    return False


def first_violation(u8[:, :] R, const i32[:] inst_a, const i32[:] inst_b, const i32[:] inst_cptr,
                    const i32[:] cand_optr, const i32[:] obl_a, const i32[:] obl_sptr,
                    const i32[:] set_b):
    cdef Py_ssize_t i, found = -1, n = inst_a.shape[0]
    with nogil:
        for i in range(n):
            if R[inst_a[i], inst_b[i]] and not _holds(R, i, inst_cptr, cand_optr, obl_a, obl_sptr, set_b):
                found = i
                break
    return found


def refine(u8[:, :] R, const i32[:] inst_a, const i32[:] inst_b, const i32[:] inst_cptr,
           const i32[:] cand_optr, const i32[:] obl_a, const i32[:] obl_sptr,
           const i32[:] set_b):
    cdef Py_ssize_t i, n = inst_a.shape[0]
    cdef long deleted = 0
    cdef bint changed = True
    cdef u8[:] fail = np.zeros(n, dtype=np.uint8)
    with nogil:
        while changed:
            changed = False
            # bulk sweep: evaluate every instance against the same R
            for i in range(n):
                fail[i] = 0
                if R[inst_a[i], inst_b[i]] and not _holds(R, i, inst_cptr, cand_optr, obl_a, obl_sptr, set_b):
                    fail[i] = 1
            for i in range(n):
                if fail[i] and R[inst_a[i], inst_b[i]]:
                    R[inst_a[i], inst_b[i]] = 0
                    deleted += 1
                    changed = True
    return deleted


BACKEND = "compiled"
