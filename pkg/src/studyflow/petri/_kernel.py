"""Pure-Python token-replay kernel.

Operates on an index-encoded net (see replay.py) so the compiled kernel in
_kernel_c.pyx can share the exact same interface and semantics. Both kernels
must stay behaviorally identical; tests/test_kernel_parity.py enforces it.

Counting convention: producing the initial marking counts into ``produced``,
consuming the final marking into ``consumed``; missing tokens are created,
counted, and then consumed like ordinary ones.
"""

from __future__ import annotations

DEPTH_CAP = 64
# safety valve for adversarial silent structures; never reached by plan nets
MAX_SEARCH_STATES = 200_000


def _enabled(marking, inputs: tuple[int, ...]) -> bool:
    for place in inputs:
        if marking[place] < 1:
            return False
    return True


def _fire(marking: list[int], inputs: tuple[int, ...], outputs: tuple[int, ...]) -> None:
    for place in inputs:
        marking[place] -= 1
    for place in outputs:
        marking[place] += 1


def _silent_search(
    marking: list[int],
    silent_ids: tuple[int, ...],
    trans_inputs: list[tuple[int, ...]],
    trans_outputs: list[tuple[int, ...]],
    goal,
) -> tuple[int, ...] | None:
    """Shortest silent firing sequence (BFS, deterministic order) reaching ``goal``.

    Returns None when no sequence up to DEPTH_CAP firings reaches it.
    """
    start = tuple(marking)
    if goal(start):
        return ()
    visited = {start}
    frontier: list[tuple[tuple[int, ...], tuple[int, ...]]] = [(start, ())]
    depth = 0
    while frontier and depth < DEPTH_CAP:
        depth += 1
        next_frontier: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
        for state, path in frontier:
            for tid in silent_ids:
                inputs = trans_inputs[tid]
                if not _enabled(state, inputs):
                    continue
                successor = list(state)
                _fire(successor, inputs, trans_outputs[tid])
                key = tuple(successor)
                if key in visited:
                    continue
                new_path = path + (tid,)
                if goal(key):
                    return new_path
                visited.add(key)
                if len(visited) > MAX_SEARCH_STATES:
                    return None
                next_frontier.append((key, new_path))
        frontier = next_frontier
    return None


def replay_sequence(
    n_places: int,
    trans_inputs: list[tuple[int, ...]],
    trans_outputs: list[tuple[int, ...]],
    silent_ids: tuple[int, ...],
    initial: tuple[int, ...],
    final: tuple[int, ...],
    events: list[tuple[int, ...]],
) -> tuple[int, int, int, int, list[int], list[int]]:
    """Replay ``events`` (candidate transition ids per event) on the encoded net.

    Returns (produced, consumed, missing, remaining, missing_per_transition,
    remaining_per_place).
    """
    marking = list(initial)
    produced = sum(initial)
    consumed = 0
    missing = 0
    missing_per_transition = [0] * len(trans_inputs)

    for candidates in events:
        fired = -1
        for tid in candidates:
            if _enabled(marking, trans_inputs[tid]):
                fired = tid
                break
        if fired < 0:
            # shortest silent sequence that enables a candidate, if any
            for tid in candidates:
                inputs = trans_inputs[tid]
                path = _silent_search(
                    marking, silent_ids, trans_inputs, trans_outputs,
                    lambda state, inputs=inputs: all(state[p] >= 1 for p in inputs),
                )
                if path is not None:
                    for silent in path:
                        _fire(marking, trans_inputs[silent], trans_outputs[silent])
                        consumed += len(trans_inputs[silent])
                        produced += len(trans_outputs[silent])
                    fired = tid
                    break
        if fired < 0:
            # force-fire the first candidate, creating the missing input tokens
            fired = candidates[0]
            for place in trans_inputs[fired]:
                if marking[place] < 1:
                    marking[place] = 1
                    missing += 1
                    missing_per_transition[fired] += 1
        _fire(marking, trans_inputs[fired], trans_outputs[fired])
        consumed += len(trans_inputs[fired])
        produced += len(trans_outputs[fired])

    # drive towards the final marking with silent transitions only
    path = _silent_search(
        marking, silent_ids, trans_inputs, trans_outputs,
        lambda state: all(state[p] >= final[p] for p in range(n_places)),
    )
    if path is not None:
        for silent in path:
            _fire(marking, trans_inputs[silent], trans_outputs[silent])
            consumed += len(trans_inputs[silent])
            produced += len(trans_outputs[silent])

    for place in range(n_places):
        need = final[place]
        if need:
            have = marking[place] if marking[place] < need else need
            marking[place] -= have
            consumed += need
            missing += need - have

    remaining = sum(marking)
    return produced, consumed, missing, remaining, missing_per_transition, marking
