"""Epoch tracking and run statistics.

An *epoch* is the maximal interval during which one edge stays matched; it
inherits the level and the random/deterministic class of the step that
created it.  A level raise of a matched edge restarts its epoch at level 1.

Random level-1 epochs snapshot the owner's edge list at creation so the
tracker can count how much of that initial list the workload deletes before
the epoch dies.  Each random level-1 epoch opens an *epoch-set*; the
deterministic level-1 epochs created later in the same update (before the
next random one) join it.  A set whose representative outlived deletion of
at least a third of its initial list is *good*, otherwise *bad*.
"""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass, field


@dataclass
class EpochRecord:
    edge: tuple[int, int]
    created_at: int
    level: int
    cls: str  # "random" | "deterministic"
    creator: str
    preceded_by_random: bool
    terminated_at: int | None = None
    owner: int | None = None
    owner_init_size: int | None = None
    deletions_from_init: int = 0

    @property
    def live(self) -> bool:
        return self.terminated_at is None


@dataclass
class EpochSetRecord:
    representative: int  # epoch id of the random level-1 representative
    members: list[int] = field(default_factory=list)  # deterministic joiners


def classify_epoch_set(tracker: EpochTracker, rec: EpochSetRecord) -> str:
    """"good" or "bad"; the representative epoch must have terminated.

    Bad means the representative died before the workload deleted the first
    third (rounded up) of the edges its owner held at creation.
    """
    rep = tracker.epochs[rec.representative]
    if rep.live:
        raise ValueError("cannot classify a set whose representative is live")
    needed = (rep.owner_init_size + 2) // 3
    return "bad" if rep.deletions_from_init < needed else "good"


class EpochTracker:
    """Observer fed by the engine's per-update event hooks."""

    def __init__(self) -> None:
        self.epochs: list[EpochRecord] = []
        self.epoch_sets: list[EpochSetRecord] = []
        self.opened = 0
        self.closed = 0
        self._live: dict[tuple[int, int], int] = {}
        self._watchers: dict[tuple[int, int], list[int]] = {}
        self._current_update = -1
        self._open_set: int | None = None
        self._random_seen_this_update = False

    # -- engine hooks --------------------------------------------------

    def on_update_begin(self, index: int, kind: str, u: int, v: int) -> None:
        self._current_update = index
        self._open_set = None
        self._random_seen_this_update = False

    def on_update_end(self, index: int, matching_size: int) -> None:
        self._open_set = None

    def on_match_set(
        self,
        index: int,
        edge: tuple[int, int],
        level: int,
        cls: str,
        *,
        creator: str,
        owner: int | None,
        owned_init: tuple[tuple[int, int], ...] | None,
    ) -> None:
        if edge in self._live:
            raise ValueError(f"epoch for {edge} already open")
        eid = len(self.epochs)
        rec = EpochRecord(
            edge=edge,
            created_at=index,
            level=level,
            cls=cls,
            creator=creator,
            preceded_by_random=self._random_seen_this_update,
            owner=owner,
            owner_init_size=len(owned_init) if owned_init is not None else None,
        )
        self.epochs.append(rec)
        self._live[edge] = eid
        self.opened += 1
        if cls == "random":
            self._random_seen_this_update = True
            self._open_set = len(self.epoch_sets)
            self.epoch_sets.append(EpochSetRecord(representative=eid))
            if owned_init:
                for e in owned_init:
                    self._watchers.setdefault(e, []).append(eid)
        elif level == 1 and self._open_set is not None:
            self.epoch_sets[self._open_set].members.append(eid)

    def on_match_unset(self, index: int, edge: tuple[int, int]) -> None:
        eid = self._live.pop(edge, None)
        if eid is None:
            raise ValueError(f"unset without an open epoch for {edge}")
        self.epochs[eid].terminated_at = index
        self.closed += 1

    def on_edge_deleted(self, index: int, edge: tuple[int, int]) -> None:
        watchers = self._watchers.pop(edge, None)
        if watchers:
            for eid in watchers:
                rec = self.epochs[eid]
                if rec.live:
                    rec.deletions_from_init += 1

    # -- summaries ------------------------------------------------------

    @property
    def live_count(self) -> int:
        return self.opened - self.closed

    def epoch_counts(self) -> dict[str, int]:
        c = {"level0": 0, "level1_random": 0, "level1_deterministic": 0}
        for rec in self.epochs:
            if rec.level == 0:
                c["level0"] += 1
            elif rec.cls == "random":
                c["level1_random"] += 1
            else:
                c["level1_deterministic"] += 1
        return c

    def set_counts(self) -> dict[str, int | float | None]:
        good = bad = live = 0
        for s in self.epoch_sets:
            if self.epochs[s.representative].live:
                live += 1
            elif classify_epoch_set(self, s) == "good":
                good += 1
            else:
                bad += 1
        done = good + bad
        return {
            "total": len(self.epoch_sets),
            "good": good,
            "bad": bad,
            "live": live,
            "bad_fraction": (bad / done) if done else None,
        }


@dataclass
class RunStats:
    """Per-run record: configuration, per-update rows, and epoch summaries.

    Wall-clock numbers live only under the ``timing`` key of the export so
    determinism checks can diff everything else byte for byte.
    """

    n: int
    threshold: int
    seed: int
    gen: str | None = None
    gen_seed: int | None = None
    rows: list[dict] = field(default_factory=list)
    wall_ns: list[int] = field(default_factory=list)
    procedures: Counter = field(default_factory=Counter)
    max_trace_len: int = 0
    tracker: EpochTracker | None = None
    final_edge_count: int = 0
    final_matching_size: int = 0

    def record_update(
        self, index: int, kind: str, u: int, v: int,
        trace_names: list[str], matching_size: int, wall_ns: int,
    ) -> None:
        self.rows.append(
            {
                "index": index,
                "op": kind,
                "u": u,
                "v": v,
                "trace_len": len(trace_names),
                "matching_size": matching_size,
            }
        )
        self.wall_ns.append(wall_ns)
        self.procedures.update(trace_names)
        if len(trace_names) > self.max_trace_len:
            self.max_trace_len = len(trace_names)

    def totals(self) -> dict:
        inserts = sum(1 for r in self.rows if r["op"] == "+")
        return {
            "updates": len(self.rows),
            "inserts": inserts,
            "deletes": len(self.rows) - inserts,
            "final_matching_size": self.final_matching_size,
            "final_edge_count": self.final_edge_count,
            "max_trace_len": self.max_trace_len,
            "procedure_calls": dict(sorted(self.procedures.items())),
        }

    def to_dict(self) -> dict:
        d = {
            "schema": "dynmatch.run_stats/1",
            "config": {"n": self.n, "threshold": self.threshold, "seed": self.seed},
            "workload": {"gen": self.gen, "seed": self.gen_seed},
            "totals": self.totals(),
            "per_update": self.rows,
        }
        if self.tracker is not None:
            d["epochs"] = {
                "opened": self.tracker.opened,
                "closed": self.tracker.closed,
                **self.tracker.epoch_counts(),
            }
            d["epoch_sets"] = self.tracker.set_counts()
        total_ns = sum(self.wall_ns)
        d["timing"] = {
            "total_ns": total_ns,
            "amortized_ns_per_update": (total_ns // len(self.rows)) if self.rows else 0,
            "per_update_ns": list(self.wall_ns),
        }
        return d

    def summary_table(self) -> str:
        """Aligned two-column totals for terminal output."""
        totals = self.totals()
        rows: list[tuple[str, object]] = [
            ("n", self.n),
            ("threshold", self.threshold),
            ("seed", self.seed),
            ("updates", totals["updates"]),
            ("inserts", totals["inserts"]),
            ("deletes", totals["deletes"]),
            ("final matching size", totals["final_matching_size"]),
            ("final edge count", totals["final_edge_count"]),
            ("max trace length", totals["max_trace_len"]),
        ]
        if self.tracker is not None:
            counts = self.tracker.epoch_counts()
            sets = self.tracker.set_counts()
            rows += [
                ("epochs opened", self.tracker.opened),
                ("epochs closed", self.tracker.closed),
                ("level-0 epochs", counts["level0"]),
                ("random level-1 epochs", counts["level1_random"]),
                ("deterministic level-1 epochs", counts["level1_deterministic"]),
                ("epoch-sets good/bad/live",
                 f"{sets['good']}/{sets['bad']}/{sets['live']}"),
            ]
        width = max(len(k) for k, _ in rows)
        return "".join(f"{k:<{width}}  {v}\n" for k, v in rows)


CSV_COLUMNS = ("index", "op", "u", "v", "trace_len", "matching_size", "wall_ns")


def export(stats: RunStats, format: str) -> str:
    """Serialize a finished run; ``format`` is "json" or "csv".

    JSON carries the full document described by :meth:`RunStats.to_dict`.
    CSV is one row per update with the columns in :data:`CSV_COLUMNS`
    (``wall_ns`` is the sole timing column).
    """
    if format == "json":
        return json.dumps(stats.to_dict(), indent=2) + "\n"
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(CSV_COLUMNS)
        for row, ns in zip(stats.rows, stats.wall_ns):
            writer.writerow(
                [row["index"], row["op"], row["u"], row["v"],
                 row["trace_len"], row["matching_size"], ns]
            )
        return buf.getvalue()
    raise ValueError(f"unknown format {format!r}")
