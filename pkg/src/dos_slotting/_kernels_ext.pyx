# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled placement kernels; mirrors dos_slotting._kernels_py exactly."""

import numpy as np

cimport numpy as cnp

BACKEND = "compiled"


def nearest_available(const unsigned char[::1] occupied, long target):
    cdef Py_ssize_t n = occupied.shape[0]
    cdef long t = target
    cdef long d, r
    if t < 1:
        t = 1
    elif t > n:
        t = n
    # outward scan; at each distance the lower side is tried first so ties
    # break toward the dock
    for d in range(n):
        r = t - d
        if r >= 1 and occupied[r - 1] == 0:
            return r
        if d > 0:
            r = t + d
            if r <= n and occupied[r - 1] == 0:
                return r
    return -1


def nearest_available_with_cost(
    const unsigned char[::1] occupied, long target, const double[::1] extra_cost
):
    cdef Py_ssize_t n = occupied.shape[0]
    cdef Py_ssize_t i
    cdef long best = -1
    cdef double best_cost = 0.0
    cdef double c
    for i in range(n):
        if occupied[i]:
            continue
        c = abs((i + 1) - target) + extra_cost[i]
        if best < 0 or c < best_cost:
            best = i + 1
            best_cost = c
    return best


def first_available(const unsigned char[::1] occupied):
    cdef Py_ssize_t n = occupied.shape[0]
    cdef Py_ssize_t i
    for i in range(n):
        if occupied[i] == 0:
            return i + 1
    return -1


def kth_available(const unsigned char[::1] occupied, long k):
    cdef Py_ssize_t n = occupied.shape[0]
    cdef Py_ssize_t i
    cdef long seen = 0
    if k < 0:
        return -1
    for i in range(n):
        if occupied[i] == 0:
            if seen == k:
                return i + 1
            seen += 1
    return -1


def nearest_available_banded(const unsigned char[::1] occupied, long lo, long hi):
    cdef Py_ssize_t n = occupied.shape[0]
    cdef Py_ssize_t i
    cdef long best = -1
    cdef long best_dist = 0
    cdef long r, d
    for i in range(n):
        if occupied[i]:
            continue
        r = i + 1
        d = 0
        if r < lo:
            d = lo - r
        elif r > hi:
            d = r - hi
        if best < 0 or d < best_dist:
            best = r
            best_dist = d
            if d == 0:
                return best  # lowest in-band rank; nothing can beat distance 0
    return best
