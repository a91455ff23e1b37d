# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled staged SIC decode kernel.

Mirrors ``_decode_py.decode_feasible`` exactly; see that module for the
semantics.  Keep the two implementations in sync.
"""


def decode_feasible(double[::1] gains, long long[::1] tx_ids, long long target_tx,
                    double[::1] betas, double noise_plus_far, double cancel_fraction):
    cdef Py_ssize_t n = gains.shape[0]
    cdef Py_ssize_t i, j, k
    cdef long long tmp_id
    cdef Py_ssize_t order[64]
    cdef double nu = noise_plus_far
    cdef double g

    if n > 64:
        raise ValueError("decode kernel supports at most 64 concurrent signals")

    for i in range(n):
        order[i] = i
        nu += gains[i]

    # insertion sort by (gain descending, tx id ascending); n is tiny
    for i in range(1, n):
        k = order[i]
        j = i - 1
        while j >= 0 and (gains[order[j]] < gains[k] or
                          (gains[order[j]] == gains[k] and tx_ids[order[j]] > tx_ids[k])):
            order[j + 1] = order[j]
            j -= 1
        order[j + 1] = k

    for i in range(n):
        k = order[i]
        g = gains[k]
        if g < betas[k] * (nu - g):
            return False
        if tx_ids[k] == target_tx:
            return True
        nu -= cancel_fraction * g
    return False
