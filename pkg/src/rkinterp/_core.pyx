# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled combinatorial kernels: Leibniz permanent/determinant and Ryser."""
import numpy as np

ctypedef double complex cplx


cdef cplx _walk(const cplx[:, ::1] A, int n, int i, char* used, cplx prod, bint signed) nogil:
    cdef cplx total = 0
    cdef cplx term
    cdef int j, k, inv, a = -1, b = -1
    if i == n:
        return prod
    if i == n - 2:
        # two free columns a < b: both orders at once
        for j in range(n):
            if not used[j]:
                if a < 0:
                    a = j
                else:
                    b = j
        if not signed:
            return prod * (A[i, a] * A[i + 1, b] + A[i, b] * A[i + 1, a])
        inv = 0
        for j in range(n):
            if used[j]:
                inv += (j > a) + (j > b)
        term = prod * (A[i, a] * A[i + 1, b] - A[i, b] * A[i + 1, a])
        return -term if inv & 1 else term
    for j in range(n):
        if not used[j]:
            inv = 0
            if signed:
                for k in range(j + 1, n):
                    inv += used[k]
            used[j] = 1
            term = _walk(A, n, i + 1, used, prod * A[i, j], signed)
            used[j] = 0
            if inv & 1:
                total -= term
            else:
                total += term
    return total


def _leibniz(A, bint signed):
    cdef const cplx[:, ::1] M = np.ascontiguousarray(A, dtype=complex)
    cdef int n = M.shape[0]
    cdef char[64] used
    cdef int j
    cdef cplx out
    if n == 0:
        return 1 + 0j
    if n > 64:
        raise ValueError("matrix too large")
    for j in range(n):
        used[j] = 0
    with nogil:
        out = _walk(M, n, 0, used, 1, signed)
    return complex(out)


def perm_leibniz(A):
    """Permanent by depth-first expansion over rows with running products."""
    return _leibniz(A, False)


def det_leibniz(A):
    """Signed Leibniz sum."""
    return _leibniz(A, True)


def perm_ryser(A):
    """Ryser's inclusion-exclusion formula, subsets visited in Gray-code order."""
    cdef const cplx[:, ::1] M = np.ascontiguousarray(A, dtype=complex)
    cdef int n = M.shape[0]
    if n == 0:
        return 1 + 0j
    if n > 62:
        raise ValueError("matrix too large")
    cdef cplx[::1] rowsum = np.zeros(n, dtype=complex)
    cdef cplx total = 0, prod
    cdef long long k, g, prev = 0, diff
    cdef int i, j, bits = 0
    with nogil:
        for k in range(1, (<long long>1) << n):
            g = k ^ (k >> 1)
            diff = g ^ prev
            j = 0
            while (diff >> j) != 1:
                j += 1
            if g & diff:
                bits += 1
                for i in range(n):
                    rowsum[i] += M[i, j]
            else:
                bits -= 1
                for i in range(n):
                    rowsum[i] -= M[i, j]
            prev = g
            prod = 1
            for i in range(n):
                prod = prod * rowsum[i]
            if bits & 1:
                total -= prod
            else:
                total += prod
    if n & 1:
        total = -total
    return complex(total)
