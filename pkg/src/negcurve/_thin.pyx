# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled greedy chord thinning.

Bit-for-bit identical accept decisions with negcurve._thin_np: same scan
order, same strict `squared distance < min_chord^2` test with left-to-right
per-coordinate summation, same uint64 cell-key mixing (collisions only add
distance checks).  See _thin_np for the full semantics.
"""

import itertools

import numpy as np

from cython.operator cimport dereference as deref
from libc.math cimport floor
from libc.stdint cimport int64_t, uint64_t
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector

from .errors import ArgumentError

cdef uint64_t[8] _MULTS
_MULTS[0] = <uint64_t> 0x9E3779B97F4A7C15
_MULTS[1] = <uint64_t> 0xC2B2AE3D27D4EB4F
_MULTS[2] = <uint64_t> 0x165667B19E3779F9
_MULTS[3] = <uint64_t> 0x27D4EB2F165667C5
_MULTS[4] = <uint64_t> 0x85EBCA77C2B2AE63
_MULTS[5] = <uint64_t> 0xD6E8FEB86659FD93
_MULTS[6] = <uint64_t> 0xFF51AFD7ED558CCD
_MULTS[7] = <uint64_t> 0xC4CEB9FE1A85EC53

cdef uint64_t _FMIX = <uint64_t> 0xFF51AFD7ED558CCD


cdef inline uint64_t _mix(const int64_t* cell, Py_ssize_t d) nogil:
    cdef uint64_t acc = 0
    cdef Py_ssize_t k
    for k in range(d):
        acc += (<uint64_t> cell[k]) * _MULTS[k % 8]
    acc ^= acc >> 33
    acc *= _FMIX
    acc ^= acc >> 33
    return acc


def thin_chord(points, double min_chord, long long count_target=-1):
    pts_arr = np.ascontiguousarray(points, dtype=np.float64)
    if pts_arr.ndim != 2:
        raise ArgumentError(f"thin_chord: points must be 2-d, got shape {pts_arr.shape}")
    cdef double[:, ::1] pts = pts_arr
    cdef Py_ssize_t n = pts.shape[0]
    cdef Py_ssize_t d = pts.shape[1]
    if not (min_chord > 0.0) or not np.isfinite(min_chord):
        raise ArgumentError(f"thin_chord: min_chord must be finite and > 0, got {min_chord}")
    if n == 0 or count_target == 0:
        return np.empty(0, dtype=np.int64)
    if not np.all(np.isfinite(pts_arr)):
        raise ArgumentError("thin_chord: points must be finite")
    if float(np.max(np.abs(pts_arr))) / min_chord >= 2.0 ** 62:
        raise ArgumentError("thin_chord: coordinates overflow the cell grid")

    cdef double c2 = min_chord * min_chord
    cdef long long target = count_target if count_target >= 0 else <long long> n + 1

    # 3^d neighbor offsets (enumeration order is irrelevant: conflicts are OR-ed).
    offs_arr = np.array(
        [list(tup) for tup in itertools.product((-1, 0, 1), repeat=d)], dtype=np.int64
    )
    cdef int64_t[:, ::1] offs = offs_arr
    cdef Py_ssize_t n_off = offs.shape[0]

    cdef unordered_map[uint64_t, vector[int64_t]] grid
    cdef vector[int64_t] accepted
    cdef vector[int64_t] cell
    cdef vector[int64_t] ncell
    cell.resize(d)
    ncell.resize(d)

    cdef Py_ssize_t i, k, o, bi
    cdef uint64_t key
    cdef bint conflict
    cdef double s, t
    cdef int64_t j
    cdef unordered_map[uint64_t, vector[int64_t]].iterator it
    cdef const vector[int64_t]* bucket

    with nogil:
        for i in range(n):
            for k in range(d):
                cell[k] = <int64_t> floor(pts[i, k] / min_chord)
            conflict = False
            for o in range(n_off):
                for k in range(d):
                    ncell[k] = cell[k] + offs[o, k]
                key = _mix(&ncell[0], d)
                it = grid.find(key)
                if it == grid.end():
                    continue
                bucket = &(deref(it).second)
                for bi in range(<Py_ssize_t> bucket[0].size()):
                    j = bucket[0][bi]
                    s = 0.0
                    for k in range(d):
                        t = pts[i, k] - pts[j, k]
                        s = s + t * t
                    if s < c2:
                        conflict = True
                        break
                if conflict:
                    break
            if not conflict:
                accepted.push_back(<int64_t> i)
                key = _mix(&cell[0], d)
                grid[key].push_back(<int64_t> i)
                if <long long> accepted.size() >= target:
                    break

    out = np.empty(accepted.size(), dtype=np.int64)
    cdef int64_t[::1] out_mv
    if accepted.size() > 0:
        out_mv = out
        for i in range(<Py_ssize_t> accepted.size()):
            out_mv[i] = accepted[i]
    return out
