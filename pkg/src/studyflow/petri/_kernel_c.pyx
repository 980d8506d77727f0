# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled token-replay kernel.

Semantics must stay identical to the pure-Python kernel in _kernel.py;
tests/test_kernel_parity.py replays shared workloads on both and compares
every counter. The arc lists are flattened into contiguous int arrays with
offset tables, and BFS states live in bytes objects read through raw
pointers, so the hot loops run on C indexing with no buffer negotiation.
"""

from cpython.bytes cimport PyBytes_FromStringAndSize
from libc.stdlib cimport free, malloc
from libc.string cimport memcpy

import array

cdef int _DEPTH_CAP = 64
cdef long _MAX_SEARCH_STATES = 200000

# Python-visible mirrors of the C search bounds, checked by the parity tests
DEPTH_CAP = _DEPTH_CAP
MAX_SEARCH_STATES = _MAX_SEARCH_STATES

# Flattening the arc tuples costs more than replaying one trace on these
# small nets, so the conversion is memoized per net content. Conformance
# sweeps replay thousands of traces against one net and hit the cache
# every time after the first call.
cdef dict _NET_CACHE = {}


cdef tuple _flatten(int n_places, list trans_inputs, list trans_outputs, tuple silent_ids):
    key = (n_places, tuple(trans_inputs), tuple(trans_outputs), silent_ids)
    entry = _NET_CACHE.get(key)
    if entry is None:
        if len(_NET_CACHE) >= 64:
            _NET_CACHE.clear()
        in_flat: list = []
        in_off = [0]
        for places in trans_inputs:
            in_flat.extend(places)
            in_off.append(len(in_flat))
        out_flat: list = []
        out_off = [0]
        for places in trans_outputs:
            out_flat.extend(places)
            out_off.append(len(out_flat))
        entry = (
            array.array("i", in_flat or [0]),
            array.array("i", in_off),
            array.array("i", out_flat or [0]),
            array.array("i", out_off),
            array.array("i", silent_ids or [0]),
            len(silent_ids),
        )
        _NET_CACHE[key] = entry
    return entry


cdef inline bint _enabled(const int* marking, int[::1] flat, int lo, int hi) noexcept:
    cdef int i
    for i in range(lo, hi):
        if marking[flat[i]] < 1:
            return False
    return True


cdef inline void _fire(
    int* marking,
    int[::1] in_flat, int ilo, int ihi,
    int[::1] out_flat, int olo, int ohi,
) noexcept:
    cdef int i
    for i in range(ilo, ihi):
        marking[in_flat[i]] -= 1
    for i in range(olo, ohi):
        marking[out_flat[i]] += 1


cdef inline bint _covers(const int* marking, int[::1] goal) noexcept:
    # goal is a full marking vector that must be covered
    cdef Py_ssize_t i
    for i in range(goal.shape[0]):
        if marking[i] < goal[i]:
            return False
    return True


cdef object _silent_search(
    const int* marking, int n_places,
    int[::1] silent, int n_silent,
    int[::1] in_flat, int[::1] in_off,
    int[::1] out_flat, int[::1] out_off,
    int mode,           # 0: enable the transition whose input slice is the goal
    int goal_lo, int goal_hi,
    int[::1] goal_vec,  # mode 1: cover this full marking
    int* scratch,
):
    """Shortest silent firing sequence reaching the goal, or None."""
    cdef int tid, depth, s
    cdef long visited_count
    cdef const int* state_p
    cdef bint reached
    cdef Py_ssize_t state_size = n_places * sizeof(int)
    if mode == 0:
        if _enabled(marking, in_flat, goal_lo, goal_hi):
            return ()
    elif _covers(marking, goal_vec):
        return ()
    start = PyBytes_FromStringAndSize(<const char*>marking, state_size)
    visited = {start}
    frontier = [(start, ())]
    visited_count = 1
    depth = 0
    while frontier and depth < _DEPTH_CAP:
        depth += 1
        next_frontier = []
        for state, path in frontier:
            state_p = <const int*><const char*>state
            for s in range(n_silent):
                tid = silent[s]
                if not _enabled(state_p, in_flat, in_off[tid], in_off[tid + 1]):
                    continue
                memcpy(scratch, state_p, state_size)
                _fire(
                    scratch,
                    in_flat, in_off[tid], in_off[tid + 1],
                    out_flat, out_off[tid], out_off[tid + 1],
                )
                successor = PyBytes_FromStringAndSize(<const char*>scratch, state_size)
                if successor in visited:
                    continue
                new_path = path + (tid,)
                if mode == 0:
                    reached = _enabled(scratch, in_flat, goal_lo, goal_hi)
                else:
                    reached = _covers(scratch, goal_vec)
                if reached:
                    return new_path
                visited.add(successor)
                visited_count += 1
                if visited_count > _MAX_SEARCH_STATES:
                    return None
                next_frontier.append((successor, new_path))
        frontier = next_frontier
    return None


def replay_sequence(
    int n_places,
    list trans_inputs,
    list trans_outputs,
    tuple silent_ids,
    tuple initial,
    tuple final,
    list events,
):
    """Replay events (candidate transition ids per event) on the encoded net.

    Returns (produced, consumed, missing, remaining, missing_per_transition,
    remaining_per_place); identical to _kernel.replay_sequence.
    """
    cdef long produced = 0, consumed = 0, missing = 0, remaining = 0
    cdef int tid, fired, place, need, have, silent_tid, n_silent
    cdef Py_ssize_t i

    flat = _flatten(n_places, trans_inputs, trans_outputs, silent_ids)
    cdef int[::1] in_flat = flat[0]
    cdef int[::1] in_off = flat[1]
    cdef int[::1] out_flat = flat[2]
    cdef int[::1] out_off = flat[3]
    cdef int[::1] silent = flat[4]
    n_silent = flat[5]

    cdef int* marking = <int*>malloc(2 * n_places * sizeof(int))
    if marking is NULL:
        raise MemoryError()
    cdef int* scratch = marking + n_places
    for i in range(n_places):
        marking[i] = initial[i]
        produced += marking[i]
    final_arr = array.array("i", final)
    cdef int[::1] final_view = final_arr

    missing_per_transition = [0] * len(trans_inputs)

    try:
        for candidates in events:
            fired = -1
            for tid in candidates:
                if _enabled(marking, in_flat, in_off[tid], in_off[tid + 1]):
                    fired = tid
                    break
            if fired < 0:
                for tid in candidates:
                    path = _silent_search(
                        marking, n_places, silent, n_silent,
                        in_flat, in_off, out_flat, out_off,
                        0, in_off[tid], in_off[tid + 1], final_view, scratch,
                    )
                    if path is not None:
                        for silent_tid in path:
                            _fire(
                                marking,
                                in_flat, in_off[silent_tid], in_off[silent_tid + 1],
                                out_flat, out_off[silent_tid], out_off[silent_tid + 1],
                            )
                            consumed += in_off[silent_tid + 1] - in_off[silent_tid]
                            produced += out_off[silent_tid + 1] - out_off[silent_tid]
                        fired = tid
                        break
            if fired < 0:
                fired = candidates[0]
                for i in range(in_off[fired], in_off[fired + 1]):
                    place = in_flat[i]
                    if marking[place] < 1:
                        marking[place] = 1
                        missing += 1
                        missing_per_transition[fired] += 1
            _fire(
                marking,
                in_flat, in_off[fired], in_off[fired + 1],
                out_flat, out_off[fired], out_off[fired + 1],
            )
            consumed += in_off[fired + 1] - in_off[fired]
            produced += out_off[fired + 1] - out_off[fired]

        path = _silent_search(
            marking, n_places, silent, n_silent,
            in_flat, in_off, out_flat, out_off,
            1, 0, 0, final_view, scratch,
        )
        if path is not None:
            for silent_tid in path:
                _fire(
                    marking,
                    in_flat, in_off[silent_tid], in_off[silent_tid + 1],
                    out_flat, out_off[silent_tid], out_off[silent_tid + 1],
                )
                consumed += in_off[silent_tid + 1] - in_off[silent_tid]
                produced += out_off[silent_tid + 1] - out_off[silent_tid]

        for place in range(n_places):
            need = final_view[place]
            if need:
                have = marking[place] if marking[place] < need else need
                marking[place] -= have
                consumed += need
                missing += need - have

        leftover = [0] * n_places
        for i in range(n_places):
            leftover[i] = marking[i]
            remaining += marking[i]
        return produced, consumed, missing, remaining, missing_per_transition, leftover
    finally:
        free(marking)
