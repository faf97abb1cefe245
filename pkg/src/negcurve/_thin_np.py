"""Pure-numpy greedy chord thinning (fallback for the compiled kernel).

Semantics (shared bit-for-bit with the compiled implementation): scan the
points in order; accept point i unless some previously *accepted* j has
squared distance < min_chord^2 (strict).  Distances are computed with the same
left-to-right per-coordinate summation as the C loop, so the accept decisions
are identical floating-point comparisons in both implementations.

Candidate conflicts are found on an integer grid of cell edge min_chord: any
conflicting pair differs by at most one cell per coordinate, so scanning the
3^d neighbor cells finds every true conflict.  Cell coordinates are mixed into
a uint64 key (wraparound arithmetic); hash collisions only ever add distance
checks, never remove any, so they cannot change the result.
"""

from __future__ import annotations

import itertools

import numpy as np

from .errors import ArgumentError

# Odd 64-bit multipliers for the cell-key mix, cycled over coordinates.
_MULTS = np.array(
    [
        0x9E3779B97F4A7C15,
        0xC2B2AE3D27D4EB4F,
        0x165667B19E3779F9,
        0x27D4EB2F165667C5,
        0x85EBCA77C2B2AE63,
        0xD6E8FEB86659FD93,
        0xFF51AFD7ED558CCD,
        0xC4CEB9FE1A85EC53,
    ],
    dtype=np.uint64,
)
_FMIX = np.uint64(0xFF51AFD7ED558CCD)
_S33 = np.uint64(33)

_CHUNK = 4096


def _mix_keys(cells: np.ndarray) -> np.ndarray:
    """uint64 key per row of int64 cell coordinates (wraparound mixing)."""
    d = cells.shape[-1]
    acc = np.zeros(cells.shape[:-1], dtype=np.uint64)
    with np.errstate(over="ignore"):
        for k in range(d):
            acc += cells[..., k].astype(np.uint64) * _MULTS[k % 8]
        acc ^= acc >> _S33
        acc *= _FMIX
        acc ^= acc >> _S33
    return acc


def _sq_dists(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise squared distances with ordered per-coordinate summation."""
    s = np.zeros(a.shape[0])
    for k in range(a.shape[1]):
        t = a[:, k] - b[:, k]
        s = s + t * t
    return s


def _expand_ranges(starts: np.ndarray, ends: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(query_index, flat_index) pairs for slices [starts[i], ends[i])."""
    counts = ends - starts
    total = int(counts.sum())
    if total == 0:
        e = np.empty(0, dtype=np.int64)
        return e, e
    q = np.repeat(np.arange(starts.shape[0], dtype=np.int64), counts)
    base = np.repeat(starts - np.concatenate(([0], np.cumsum(counts)[:-1])), counts)
    return q, base + np.arange(total, dtype=np.int64)


def thin_chord(points: np.ndarray, min_chord: float, count_target: int = -1) -> np.ndarray:
    pts = np.ascontiguousarray(points, dtype=float)
    if pts.ndim != 2:
        raise ArgumentError(f"thin_chord: points must be 2-d, got shape {pts.shape}")
    n, d = pts.shape
    if not (min_chord > 0.0) or not np.isfinite(min_chord):
        raise ArgumentError(f"thin_chord: min_chord must be finite and > 0, got {min_chord}")
    if n == 0 or count_target == 0:
        return np.empty(0, dtype=np.int64)
    if not np.all(np.isfinite(pts)):
        raise ArgumentError("thin_chord: points must be finite")
    scaled = pts / min_chord
    if np.max(np.abs(scaled)) >= 2.0 ** 62:
        raise ArgumentError("thin_chord: coordinates overflow the cell grid")
    cells = np.floor(scaled).astype(np.int64)
    c2 = min_chord * min_chord

    offsets = np.array(list(itertools.product((-1, 0, 1), repeat=d)), dtype=np.int64)
    self_keys_all = _mix_keys(cells)

    accepted: list[int] = []
    acc_keys = np.empty(0, dtype=np.uint64)  # keys of accepted points (unsorted)
    target = count_target if count_target >= 0 else n + 1

    for lo in range(0, n, _CHUNK):
        hi = min(lo + _CHUNK, n)
        m = hi - lo
        chunk_cells = cells[lo:hi]
        # Keys of every neighbor cell of every chunk point: (3^d, m).
        neigh = _mix_keys(chunk_cells[None, :, :] + offsets[:, None, :])

        # --- conflicts against points accepted in previous chunks
        conflict_prev = np.zeros(m, dtype=bool)
        if acc_keys.shape[0]:
            order = np.argsort(acc_keys, kind="stable")
            sorted_keys = acc_keys[order]
            flat = neigh.reshape(-1)
            s = np.searchsorted(sorted_keys, flat, side="left")
            e = np.searchsorted(sorted_keys, flat, side="right")
            q, j = _expand_ranges(s, e)
            if q.shape[0]:
                qi = q % m  # chunk-local index (offset axis is the slow one)
                acc_idx = np.asarray(accepted, dtype=np.int64)[order[j]]
                hit = _sq_dists(pts[lo + qi], pts[acc_idx]) < c2
                conflict_prev[np.unique(qi[hit])] = True

        # --- within-chunk conflict pairs (earlier index -> later index)
        order_c = np.argsort(self_keys_all[lo:hi], kind="stable")
        sorted_self = self_keys_all[lo:hi][order_c]
        flat = neigh.reshape(-1)
        s = np.searchsorted(sorted_self, flat, side="left")
        e = np.searchsorted(sorted_self, flat, side="right")
        q, j = _expand_ranges(s, e)
        adjacency: dict[int, list[int]] = {}
        if q.shape[0]:
            qi = q % m
            other = order_c[j]
            keep = other != qi
            qi, other = qi[keep], other[keep]
            if qi.shape[0]:
                hit = _sq_dists(pts[lo + qi], pts[lo + other]) < c2
                for a, b in zip(other[hit], qi[hit]):
                    a, b = int(a), int(b)
                    if a < b:  # record only (earlier -> later); the reverse
                        adjacency.setdefault(b, []).append(a)  # pair also occurs

        # --- sequential accept scan over the chunk
        local_accepted: set[int] = set()
        new_keys: list[int] = []
        done = False
        for i in range(m):
            if conflict_prev[i]:
                continue
            ear = adjacency.get(i)
            if ear is not None and any(a in local_accepted for a in ear):
                continue
            local_accepted.add(i)
            accepted.append(lo + i)
            new_keys.append(int(self_keys_all[lo + i]))
            if len(accepted) >= target:
                done = True
                break
        if new_keys:
            acc_keys = np.concatenate([acc_keys, np.array(new_keys, dtype=np.uint64)])
        if done:
            break

    return np.asarray(accepted, dtype=np.int64)
