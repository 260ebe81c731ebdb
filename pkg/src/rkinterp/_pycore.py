"""Pure-Python combinatorial kernels (fallback for the compiled core).

Same interface as the extension module; practical up to n of about 8 for the
Leibniz sums.
"""
import numpy as np


def perm_leibniz(A):
    """Permanent by depth-first expansion over rows with running products."""
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    if n == 0:
        return 1 + 0j
    rows = A.tolist()
    used = [False] * n

    def walk(i, prod):
        if i == n:
            return prod
        total = 0j
        row = rows[i]
        for j in range(n):
            if not used[j]:
                used[j] = True
                total += walk(i + 1, prod * row[j])
                used[j] = False
        return total

    return complex(walk(0, 1 + 0j))


def det_leibniz(A):
    """Signed Leibniz sum; the sign flips once per used column to the right."""
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    if n == 0:
        return 1 + 0j
    rows = A.tolist()
    used = [False] * n

    def walk(i, prod):
        if i == n:
            return prod
        total = 0j
        row = rows[i]
        for j in range(n):
            if not used[j]:
                # inversions added by placing column j now
                inv = sum(used[k] for k in range(j + 1, n))
                used[j] = True
                term = walk(i + 1, prod * row[j])
                used[j] = False
                total += -term if inv & 1 else term
        return total

    return complex(walk(0, 1 + 0j))


def perm_ryser(A):
    """Ryser's inclusion-exclusion formula, subsets visited in Gray-code order."""
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    if n == 0:
        return 1 + 0j
    rowsum = np.zeros(n, dtype=complex)
    total = 0j
    sign = -1 if n & 1 else 1
    prev = 0
    for k in range(1, 1 << n):
        g = k ^ (k >> 1)
        diff = g ^ prev
        j = diff.bit_length() - 1
        if g & diff:
            rowsum += A[:, j]
        else:
            rowsum -= A[:, j]
        prev = g
        s = -1 if bin(g).count("1") & 1 else 1
        total += s * np.prod(rowsum)
    return complex(sign * total)
