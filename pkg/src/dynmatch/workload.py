"""Update-sequence generation, validation, and (de)serialization.

A sequence is replayable when every insert targets an absent edge and every
delete a present one, with no self-loops; generators produce replayable
sequences by construction and :func:`parse` enforces it line by line.
Generator randomness is independent of the algorithm's randomness: the
sequences never depend on how the structure responds.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

INSERT = "+"
DELETE = "-"

PATTERNS = ("star-churn", "clique-build-teardown", "path-zipper")


class SequenceFormatError(ValueError):
    """Malformed or non-replayable sequence text."""

    def __init__(self, line_no: int, message: str) -> None:
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class UpdateOp:
    kind: str  # INSERT or DELETE
    u: int
    v: int

    def edge(self) -> tuple[int, int]:
        return (self.u, self.v) if self.u < self.v else (self.v, self.u)


@dataclass
class UpdateSequence:
    n: int
    ops: list[UpdateOp] = field(default_factory=list)
    gen: str | None = None
    seed: int | None = None

    def __len__(self) -> int:
        return len(self.ops)

    def validate(self) -> None:
        """Raise if any op is malformed or not replayable from empty."""
        edges: set[tuple[int, int]] = set()
        for i, op in enumerate(self.ops):
            _check_op(self.n, edges, op, i + 1)

    def final_edges(self) -> list[tuple[int, int]]:
        """Edge set left after replaying all ops, ascending."""
        edges: set[tuple[int, int]] = set()
        for op in self.ops:
            if op.kind == INSERT:
                edges.add(op.edge())
            else:
                edges.discard(op.edge())
        return sorted(edges)


def _check_op(n: int, edges: set[tuple[int, int]], op: UpdateOp, line_no: int) -> None:
    if op.u == op.v:
        raise SequenceFormatError(line_no, f"self-loop {op.u}")
    if not (0 <= op.u < n and 0 <= op.v < n):
        raise SequenceFormatError(line_no, f"vertex out of range in ({op.u}, {op.v})")
    e = op.edge()
    if op.kind == INSERT:
        if e in edges:
            raise SequenceFormatError(line_no, f"insert of present edge {e}")
        edges.add(e)
    elif op.kind == DELETE:
        if e not in edges:
            raise SequenceFormatError(line_no, f"delete of absent edge {e}")
        edges.remove(e)
    else:
        raise SequenceFormatError(line_no, f"unknown op kind {op.kind!r}")


def gen_random(n: int, t: int, p_insert: float, seed: int) -> UpdateSequence:
    """t ops: insert a uniform absent pair w.p. ``p_insert``, else delete a
    uniform present edge.  Falls back to the other action when the graph is
    complete or empty, so the requested length is always met.  p_insert = 1
    yields a pure insertion stream.
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if not 0.0 < p_insert <= 1.0:
        raise ValueError(f"p_insert must be in (0, 1], got {p_insert}")
    if n < 2 and t > 0:
        raise ValueError("need at least 2 vertices to generate updates")
    rng = random.Random(seed)
    complete = n * (n - 1) // 2
    present: list[tuple[int, int]] = []
    pos: dict[tuple[int, int], int] = {}
    ops: list[UpdateOp] = []
    for _ in range(t):
        do_insert = rng.random() < p_insert
        if do_insert and len(present) == complete:
            do_insert = False
        elif not do_insert and not present:
            do_insert = True
        if do_insert:
            while True:
                u = rng.randrange(n)
                v = rng.randrange(n)
                if u == v:
                    continue
                e = (u, v) if u < v else (v, u)
                if e not in pos:
                    break
            pos[e] = len(present)
            present.append(e)
            ops.append(UpdateOp(INSERT, e[0], e[1]))
        else:
            i = rng.randrange(len(present))
            e = present[i]
            last = present.pop()
            if last != e:
                present[i] = last
                pos[last] = i
            del pos[e]
            ops.append(UpdateOp(DELETE, e[0], e[1]))
    return UpdateSequence(n=n, ops=ops, gen="random", seed=seed)


def gen_named(pattern: str, n: int, seed: int) -> UpdateSequence:
    """Deterministic stress patterns.

    star-churn: pair the spokes up, then build a maximum star on vertex 0
    and churn the pair and star edges -- the paired spokes own the hub's
    edges, so the hub's degree outruns its ownership list and the
    high-degree re-match paths fire, at both levels.
    clique-build-teardown: insert all pairs ascending, then delete them
    all -- hammers matched-edge deletions at both levels.
    path-zipper: grow a path inserting each 4-block's middle edge first --
    manufactures a length-3 augmenting path at every block.
    """
    ops: list[UpdateOp] = []
    if pattern == "star-churn":
        if n < 2:
            raise ValueError("star-churn needs n >= 2")
        # ring the spokes first: the ring edges land in spoke ownership
        # lists, so the hub's star edges do too, and the hub's degree can
        # reach the cutoff while its own list stays small
        for i in range(1, n - 1):
            ops.append(UpdateOp(INSERT, i, i + 1))
        if n - 1 >= 3:
            ops.append(UpdateOp(INSERT, n - 1, 1))
        for i in range(1, n):
            ops.append(UpdateOp(INSERT, 0, i))
        for _ in range(2):
            for i in range(1, n - 1, 2):
                ops.append(UpdateOp(DELETE, i, i + 1))
                ops.append(UpdateOp(INSERT, i, i + 1))
                ops.append(UpdateOp(DELETE, 0, i))
                ops.append(UpdateOp(INSERT, 0, i))
                ops.append(UpdateOp(DELETE, 0, i + 1))
                ops.append(UpdateOp(INSERT, 0, i + 1))
            if n % 2 == 0 and n > 2:  # odd spoke count: one spoke unpaired
                ops.append(UpdateOp(DELETE, 0, n - 1))
                ops.append(UpdateOp(INSERT, 0, n - 1))
    elif pattern == "clique-build-teardown":
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
        ops.extend(UpdateOp(INSERT, u, v) for u, v in pairs)
        ops.extend(UpdateOp(DELETE, u, v) for u, v in pairs)
    elif pattern == "path-zipper":
        if n == 2:
            ops.append(UpdateOp(INSERT, 0, 1))
        for b in range(0, n - 2, 4):
            ops.append(UpdateOp(INSERT, b + 1, b + 2))
            ops.append(UpdateOp(INSERT, b, b + 1))
            if b + 3 < n:
                ops.append(UpdateOp(INSERT, b + 2, b + 3))
            if b + 4 < n:
                ops.append(UpdateOp(INSERT, b + 3, b + 4))
    else:
        raise ValueError(f"unknown pattern {pattern!r}; known: {PATTERNS}")
    seq = UpdateSequence(n=n, ops=ops, gen=pattern, seed=seed)
    seq.validate()
    return seq


def extend_with_teardown(seq: UpdateSequence) -> UpdateSequence:
    """Append deletes of every remaining edge, ascending (u, v)."""
    extra = [UpdateOp(DELETE, u, v) for u, v in seq.final_edges()]
    return UpdateSequence(
        n=seq.n, ops=list(seq.ops) + extra, gen=seq.gen, seed=seq.seed
    )


def serialize(seq: UpdateSequence) -> str:
    """Text form: `n=<int>` header, optional metadata comment, one op per
    line as `+ u v` / `- u v`."""
    lines = [f"n={seq.n}"]
    meta = []
    if seq.seed is not None:
        meta.append(f"seed={seq.seed}")
    if seq.gen is not None:
        meta.append(f"gen={seq.gen}")
    if meta:
        lines.append("# " + " ".join(meta))
    for op in seq.ops:
        lines.append(f"{op.kind} {op.u} {op.v}")
    return "\n".join(lines) + "\n"


def parse(text: str) -> UpdateSequence:
    """Inverse of :func:`serialize`; validates replayability as it reads."""
    lines = text.splitlines()
    if not lines:
        raise SequenceFormatError(1, "empty input, expected n=<int> header")
    header = lines[0].strip()
    if not header.startswith("n="):
        raise SequenceFormatError(1, f"expected n=<int> header, got {header!r}")
    try:
        n = int(header[2:])
    except ValueError:
        raise SequenceFormatError(1, f"bad vertex count {header[2:]!r}") from None
    if n < 1:
        raise SequenceFormatError(1, f"vertex count must be >= 1, got {n}")
    seq = UpdateSequence(n=n)
    edges: set[tuple[int, int]] = set()
    for line_no, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            for token in line[1:].split():
                if token.startswith("seed="):
                    try:
                        seq.seed = int(token[5:])
                    except ValueError:
                        raise SequenceFormatError(line_no, f"bad seed {token!r}") from None
                elif token.startswith("gen="):
                    seq.gen = token[4:]
            continue
        parts = line.split()
        if len(parts) != 3 or parts[0] not in (INSERT, DELETE):
            raise SequenceFormatError(line_no, f"expected '<+|-> <u> <v>', got {raw!r}")
        try:
            u, v = int(parts[1]), int(parts[2])
        except ValueError:
            raise SequenceFormatError(line_no, f"non-integer vertex in {raw!r}") from None
        op = UpdateOp(parts[0], u, v)
        _check_op(n, edges, op, line_no)
        seq.ops.append(op)
    return seq
