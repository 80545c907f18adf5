"""Update engine: edge insertion and deletion with full invariant repair.

The two entry points, :func:`insert_edge` and :func:`delete_edge`, restore
the structure's working rules before returning:

  1a. every level-1 vertex is matched;
  1b. every free vertex is at level 0 and has only matched neighbors;
  2.  every level-0 vertex owns fewer than ``threshold`` edges;
  3.  every matched level-0 vertex has degree below ``threshold``;
  4.  matched partners share a level;
  5.  no length-3 augmenting path survives.

The repair procedures come in deterministic/randomized pairs.  The boolean
argument called ``flag`` selects the deterministic variant (1) once a
randomized settle has already run in the current update, keeping the number
of procedure calls per update bounded by a constant.

Inline macros (ownership transfers, free-list maintenance, the augmenting
path probe) are plain loops and are not recorded in the per-update trace;
the eight named procedures are.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import State

PROCEDURE_NAMES = (
    "naive_settle_augmented",
    "random_settle_augmented",
    "deterministic_raise_level_to_1",
    "randomised_raise_level_to_1",
    "fix_3_aug_path_d",
    "fix_3_aug_path",
    "handle_delete_level1",
    "handle_insert_level0",
)


@dataclass
class ProcedureTrace:
    """Procedure calls recorded during one update, in call order."""

    calls: list[tuple] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.calls)

    def names(self) -> list[str]:
        return [c[0] for c in self.calls]


def _begin_update(state: State, kind: str, u: int, v: int) -> ProcedureTrace:
    state.update_index += 1
    state.flag = False
    trace = ProcedureTrace()
    state.trace = trace.calls
    obs = state.observer
    if obs is not None:
        obs.on_update_begin(state.update_index, kind, u, v)
    return trace


def _end_update(state: State) -> None:
    obs = state.observer
    if obs is not None:
        obs.on_update_end(state.update_index, state.matching_size)


def _match(state, u, v, creator, *, random_pick=False, owner=None, init=None):
    """set_match plus the epoch-creation event for the metrics observer."""
    state.set_match(u, v)
    obs = state.observer
    if obs is not None:
        level = state.level
        obs.on_match_set(
            state.update_index,
            (u, v) if u < v else (v, u),
            max(level[u], level[v]),
            "random" if random_pick else "deterministic",
            creator=creator,
            owner=owner,
            owned_init=init,
        )


def _unmatch(state, u, v):
    state.unset_match(u, v)
    obs = state.observer
    if obs is not None:
        obs.on_match_unset(state.update_index, (u, v) if u < v else (v, u))


# ---------------------------------------------------------------------------
# Macros (inline helpers, not traced)
# ---------------------------------------------------------------------------


def check_3_aug_path(state: State, u: int, v: int) -> int | None:
    """Free endpoint of a length-3 augmenting path u-v-mate(v)-z, if any.

    Temporarily hides u from mate(v)'s free-neighbor index so the probe
    cannot answer with u itself, then restores it.  Never modifies the
    matching; O(threshold + n/threshold) when a candidate exists, O(1)
    otherwise.
    """
    y = state.mate[v]
    if y is None:
        raise ValueError(f"check_3_aug_path: {v} is unmatched")
    fy = state.free_index[y]
    removed = False
    if u in fy.members:
        fy.delete(u)
        removed = True
    z = fy.get_free() if fy.total else None
    if removed:
        fy.insert(u)
    return z


def transfer_ownership_from(state: State, u: int) -> None:
    """Hand u's edges whose other endpoint sits at level 1 to that endpoint."""
    level = state.level
    for w in state.owners[u].sorted_items():
        if level[w] == 1:
            state.own_remove(u, w)
            state.own_add(w, u)


def transfer_ownership_to(state: State, u: int) -> None:
    """Pull in u's edges currently owned by level-0 neighbors."""
    level = state.level
    owners = state.owners
    for w in sorted(state.adj[u]):
        if level[w] == 0 and u in owners[w]:
            state.own_remove(w, u)
            state.own_add(u, w)


def take_ownership(state: State, u: int) -> None:
    """Pull in every edge incident on u that u does not own yet."""
    owners = state.owners
    for w in sorted(state.adj[u]):
        if u in owners[w]:
            state.own_remove(w, u)
            state.own_add(u, w)


def insert_to_f_list(state: State, u: int) -> None:
    """Record u as free in every neighbor's index."""
    for w in sorted(state.adj[u]):
        state.f_insert(w, u)


def delete_from_f_list(state: State, u: int) -> None:
    """Erase u from every neighbor's free index."""
    for w in sorted(state.adj[u]):
        state.f_delete(w, u)


# ---------------------------------------------------------------------------
# Procedures
# ---------------------------------------------------------------------------


def naive_settle_augmented(state: State, u: int, flag: int) -> None:
    """Settle a free level-0 vertex u by direct search.

    Matches u to a recorded free neighbor when one exists, raising
    whichever endpoint then exceeds the degree cutoff (deterministically
    when ``flag`` is set, randomly otherwise).  With no free neighbor, u
    scans its neighborhood for a length-3 augmenting path and fixes the
    first one found; if u stays free it is recorded in its neighbors' free
    indexes.
    """
    state.trace.append(("naive_settle_augmented", u, flag))
    mate = state.mate
    threshold = state.threshold
    if state.has_free(u):
        w = state.get_free(u)
        _match(state, u, w, "naive_settle_augmented")
        if state.deg(u) >= threshold:
            if flag:
                deterministic_raise_level_to_1(state, u)
                delete_from_f_list(state, u)
                delete_from_f_list(state, w)
            else:
                randomised_raise_level_to_1(state, u)
        elif state.deg(w) >= threshold:
            if flag:
                deterministic_raise_level_to_1(state, w)
                delete_from_f_list(state, u)
                delete_from_f_list(state, w)
            else:
                randomised_raise_level_to_1(state, w)
                if mate[u] is None:
                    naive_settle_augmented(state, u, 1)
        else:
            delete_from_f_list(state, u)
            delete_from_f_list(state, w)
    else:
        for x in sorted(state.adj[u]):
            if mate[x] is None:
                continue
            z = check_3_aug_path(state, u, x)
            if z is not None:
                if flag:
                    fix_3_aug_path_d(state, u, x, mate[x], z)
                else:
                    fix_3_aug_path(state, u, x, mate[x], z)
                break
        if mate[u] is None:
            insert_to_f_list(state, u)


def random_settle_augmented(state: State, u: int) -> int | None:
    """Match a free level-0 vertex u to a uniform pick from its owned edges.

    Raises the new pair to level 1.  Returns the displaced previous mate of
    the pick (to be re-settled by the caller), or None.  Ends by probing
    for a fresh length-3 augmenting path through u and fixing it.
    """
    state.trace.append(("random_settle_augmented", u))
    obs = state.observer
    init = None
    if obs is not None:
        init = tuple(
            (u, w) if u < w else (w, u) for w in state.owners[u].sorted_items()
        )
    y = state.own_sample_uniform(u)
    transfer_ownership_to(state, y)
    mate = state.mate
    if mate[y] is not None:
        x = mate[y]
        _unmatch(state, x, y)
    else:
        x = None
    level = state.level
    level[u] = 1
    level[y] = 1
    _match(state, u, y, "random_settle_augmented", random_pick=True, owner=u, init=init)
    delete_from_f_list(state, u)
    delete_from_f_list(state, y)
    if state.has_free(u):
        w = state.get_free(u)
        z = check_3_aug_path(state, w, u)
        if z is not None:
            fix_3_aug_path_d(state, w, u, y, z)
        elif w in state.free_index[y].members:
            # F(y) is exactly {w}: any surviving path must end at w on
            # y's side, so retry the near side with a different free
            # neighbor of u.
            fu = state.free_index[u]
            fu.delete(w)
            x2 = fu.get_free() if fu.total else None
            fu.insert(w)
            if x2 is not None:
                fix_3_aug_path_d(state, x2, u, y, w)
    state.flag = True
    return x


def deterministic_raise_level_to_1(state: State, u: int) -> None:
    """Raise a matched level-0 pair to level 1, keeping the matching.

    u takes every incident edge; its mate collects the edges owned by its
    own level-0 neighbors.  The epoch restarts at level 1 for the metrics
    stream.
    """
    state.trace.append(("deterministic_raise_level_to_1", u))
    v = state.mate[u]
    take_ownership(state, u)
    transfer_ownership_to(state, v)
    level = state.level
    level[u] = 1
    level[v] = 1
    obs = state.observer
    if obs is not None:
        edge = (u, v) if u < v else (v, u)
        obs.on_match_unset(state.update_index, edge)
        obs.on_match_set(
            state.update_index,
            edge,
            1,
            "deterministic",
            creator="deterministic_raise_level_to_1",
            owner=None,
            owned_init=None,
        )


def randomised_raise_level_to_1(state: State, u: int) -> None:
    """Raise an over-degree matched level-0 vertex u via a random re-match.

    Dissolves u's current match, takes ownership of all incident edges and
    re-settles u randomly at level 1.  The displaced vertices (the random
    pick's previous mate and u's own previous mate) are settled before
    returning; a previous mate left free at level 1 is the caller's case
    to handle.
    """
    state.trace.append(("randomised_raise_level_to_1", u))
    mate = state.mate
    v = mate[u]
    _unmatch(state, u, v)
    take_ownership(state, u)
    x = random_settle_augmented(state, u)
    if x is not None:
        if state.level[x] == 1:
            handle_delete_level1(state, x, 1)
        else:
            naive_settle_augmented(state, x, 1)
    if mate[v] is None and state.level[v] == 0:
        naive_settle_augmented(state, v, 1)


def fix_3_aug_path_d(state: State, u: int, v: int, y: int, z: int) -> None:
    """Exchange the augmenting path u-v-y-z, raising all four to level 1.

    Deterministic leaf: makes no further procedure calls.  u is free at
    level 0, (v, y) is matched, z is a free neighbor of y distinct from u,
    and neither u nor z has a free neighbor.
    """
    state.trace.append(("fix_3_aug_path_d", u, v, y, z))
    level = state.level
    for p in (u, z):
        transfer_ownership_to(state, p)
        delete_from_f_list(state, p)
    if level[v] == 0:
        transfer_ownership_to(state, v)
        transfer_ownership_to(state, y)
        level[v] = 1
        level[y] = 1
    _unmatch(state, v, y)
    _match(state, u, v, "fix_3_aug_path_d")
    _match(state, y, z, "fix_3_aug_path_d")
    level[u] = 1
    level[z] = 1


def fix_3_aug_path(state: State, u: int, v: int, y: int, z: int) -> None:
    """Exchange the augmenting path u-v-y-z, then restore levels case-wise.

    Same entry contract as :func:`fix_3_aug_path_d`, but reached before any
    randomized settle has run this update, so over-degree endpoints are
    raised through the randomized path.
    """
    state.trace.append(("fix_3_aug_path", u, v, y, z))
    mate = state.mate
    level = state.level
    threshold = state.threshold
    _unmatch(state, v, y)
    _match(state, u, v, "fix_3_aug_path")
    _match(state, y, z, "fix_3_aug_path")
    # u and z are matched now; erase them from the free indexes before any
    # nested call can probe those indexes and treat them as free.
    delete_from_f_list(state, u)
    delete_from_f_list(state, z)
    if level[v] == 1:
        if state.deg(u) >= threshold:
            transfer_ownership_to(state, z)
            level[z] = 1
            randomised_raise_level_to_1(state, u)
            if mate[v] is None and level[v] == 1:
                handle_delete_level1(state, v, 1)
        elif state.deg(z) >= threshold:
            transfer_ownership_to(state, u)
            level[u] = 1
            randomised_raise_level_to_1(state, z)
            if mate[y] is None and level[y] == 1:
                handle_delete_level1(state, y, 1)
        else:
            for p in (u, z):
                transfer_ownership_to(state, p)
            level[u] = 1
            level[z] = 1
    else:
        if state.deg(u) >= threshold:
            randomised_raise_level_to_1(state, u)
            if mate[v] is None and level[v] == 0:
                naive_settle_augmented(state, v, 1)
        if (
            state.deg(z) >= threshold
            and mate[z] is not None
            and level[z] == 0
        ):
            randomised_raise_level_to_1(state, z)
            if mate[y] is None and level[y] == 0:
                naive_settle_augmented(state, y, 1)


def handle_delete_level1(state: State, u: int, flag: int) -> None:
    """Re-settle a vertex left free at level 1.

    u first sheds the edges belonging at its level-1 neighbors and drops to
    level 0.  A still-large ownership list forces a randomized re-match;
    otherwise u settles naively.
    """
    state.trace.append(("handle_delete_level1", u, flag))
    transfer_ownership_from(state, u)
    state.level[u] = 0
    if len(state.owners[u]) >= state.threshold:
        x = random_settle_augmented(state, u)
        if x is not None:
            if state.level[x] == 1:
                handle_delete_level1(state, x, 1)
            else:
                naive_settle_augmented(state, x, 1)
    else:
        naive_settle_augmented(state, u, flag)


def handle_insert_level0(state: State, u: int, v: int) -> None:
    """Insertion casework when both endpoints sit at level 0.

    The new edge is charged to the endpoint with the larger ownership list
    (ties to the first argument); two free endpoints are matched on the
    spot.  The list that reaches the threshold triggers a randomized
    re-match of its vertex, with displaced mates settled afterwards;
    below the threshold the cases reduce to degree raises or a single
    augmenting-path probe.
    """
    state.trace.append(("handle_insert_level0", u, v))
    mate = state.mate
    level = state.level
    threshold = state.threshold
    owners = state.owners
    if len(owners[u]) >= len(owners[v]):
        state.own_add(u, v)
    else:
        state.own_add(v, u)
    both_free = mate[u] is None and mate[v] is None
    if both_free:
        _match(state, u, v, "handle_insert_level0")
    if len(owners[v]) > len(owners[u]):
        u, v = v, u
    if len(owners[u]) >= threshold:
        transfer_ownership_to(state, u)
        old_mate = mate[u]
        if old_mate is not None:
            _unmatch(state, u, old_mate)
        x = random_settle_augmented(state, u)
        if x is not None:
            if level[x] == 1:
                handle_delete_level1(state, x, 1)
            else:
                naive_settle_augmented(state, x, 1)
        if old_mate is not None and mate[old_mate] is None and level[old_mate] == 0:
            naive_settle_augmented(state, old_mate, 1)
        if not both_free:
            if mate[v] is not None and state.deg(v) >= threshold and level[v] == 0:
                deterministic_raise_level_to_1(state, v)
    else:
        if mate[v] is not None:
            if state.deg(v) >= threshold:
                randomised_raise_level_to_1(state, v)
                if mate[u] is not None and state.deg(u) >= threshold and level[u] == 0:
                    deterministic_raise_level_to_1(state, u)
            elif mate[u] is None:
                z = check_3_aug_path(state, u, v)
                if z is not None:
                    fix_3_aug_path(state, u, v, mate[v], z)
            elif state.deg(u) >= threshold:
                randomised_raise_level_to_1(state, u)
        elif mate[u] is not None:
            if state.deg(u) >= threshold:
                randomised_raise_level_to_1(state, u)
            elif mate[v] is None:
                z = check_3_aug_path(state, v, u)
                if z is not None:
                    fix_3_aug_path(state, v, u, mate[u], z)
        if both_free and state.deg(u) < threshold and state.deg(v) < threshold:
            delete_from_f_list(state, u)
            delete_from_f_list(state, v)


# ---------------------------------------------------------------------------
# Update entry points
# ---------------------------------------------------------------------------


def insert_edge(state: State, u: int, v: int) -> ProcedureTrace:
    """Insert edge (u, v) and restore every working rule.

    Rejects self-loops and already-present edges.  A free endpoint is
    recorded in the other endpoint's free index up front so the repair
    procedures see the new adjacency; whatever is still free at the end
    stays correctly indexed.
    """
    state.check_vertex(u)
    state.check_vertex(v)
    if u == v:
        raise ValueError(f"self-loop ({u}, {v}) rejected")
    if v in state.adj[u]:
        raise ValueError(f"edge ({u}, {v}) already present")
    trace = _begin_update(state, "+", u, v)
    state.add_edge(u, v)
    mate = state.mate
    if mate[u] is None:
        state.f_insert(v, u)
    if mate[v] is None:
        state.f_insert(u, v)
    lu, lv = state.level[u], state.level[v]
    if lu == 1 and lv == 1:
        if u < v:
            state.own_add(u, v)
        else:
            state.own_add(v, u)
    elif lu == 1:
        state.own_add(u, v)
        if mate[v] is None:
            z = check_3_aug_path(state, v, u)
            if z is not None:
                fix_3_aug_path(state, v, u, mate[u], z)
        elif state.deg(v) >= state.threshold:
            randomised_raise_level_to_1(state, v)
    elif lv == 1:
        state.own_add(v, u)
        if mate[u] is None:
            z = check_3_aug_path(state, u, v)
            if z is not None:
                fix_3_aug_path(state, u, v, mate[v], z)
        elif state.deg(u) >= state.threshold:
            randomised_raise_level_to_1(state, u)
    else:
        handle_insert_level0(state, u, v)
    _end_update(state)
    return trace


def delete_edge(state: State, u: int, v: int) -> ProcedureTrace:
    """Delete edge (u, v) and restore every working rule.

    Drops the edge from the adjacency, its owner's list, and both
    free-index cross references.  Deleting an unmatched edge makes no
    procedure calls; a matched edge dissolves and both endpoints are
    re-settled according to their level.
    """
    state.check_vertex(u)
    state.check_vertex(v)
    if v not in state.adj[u]:
        raise ValueError(f"edge ({u}, {v}) not present")
    trace = _begin_update(state, "-", u, v)
    state.remove_edge(u, v)
    if v in state.owners[u]:
        state.own_remove(u, v)
    else:
        state.own_remove(v, u)
    state.f_delete(u, v)
    state.f_delete(v, u)
    obs = state.observer
    mate = state.mate
    was_matched = mate[u] == v
    pair_level = max(state.level[u], state.level[v])
    if was_matched:
        _unmatch(state, u, v)
    # Fired after the unset: an epoch's own edge deletion is not one of the
    # prior init-set deletions its classification counts.
    if obs is not None:
        obs.on_edge_deleted(state.update_index, (u, v) if u < v else (v, u))
    if was_matched:
        if pair_level == 0:
            naive_settle_augmented(state, u, 0)
        else:
            handle_delete_level1(state, u, 0)
        if mate[v] is None:
            if state.level[v] == 1:
                handle_delete_level1(state, v, 0)
            else:
                naive_settle_augmented(state, v, 0)
    _end_update(state)
    return trace


def apply_update(state: State, kind: str, u: int, v: int) -> ProcedureTrace:
    """Dispatch one update op; ``kind`` is "+" (insert) or "-" (delete)."""
    if kind == "+":
        return insert_edge(state, u, v)
    if kind == "-":
        return delete_edge(state, u, v)
    raise ValueError(f"unknown update kind {kind!r}")
