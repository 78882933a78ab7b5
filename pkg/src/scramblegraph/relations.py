"""Pairwise relations between MAC contigs that share a MIC contig.

Every MAC contig on a MIC contig is reduced to its sorted MDS intervals
(in MIC coordinates) plus the gaps between them, the IES intervals.  For
an ordered pair of contigs three boolean relations are detected:

* overlap      -- two MDSs share at least ``overlap_min_bp`` bases and
                  neither is a margined sub-interval of the other,
* containment  -- an MDS of the first contig sits inside an MDS of the
                  second with at least ``containment_margin_bp`` spare
                  bases on both ends,
* interleave   -- an MDS of the second contig falls into an IES of the
                  first, protruding at most ``interleave_slack_bp`` bases
                  on either side.

A containment whose margins fall below the threshold on some end counts
as an overlap when the shared length is large enough; it is neither a
"clean" containment nor excluded from overlapping.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .errors import InternalConsistencyError

__all__ = [
    "Interval",
    "RelationTriple",
    "RelationConfig",
    "MacContigView",
    "ies_intervals",
    "detect_overlap",
    "detect_containment",
    "detect_interleave",
    "relation_triple",
    "relation_counts",
    "contig_views",
]


@dataclass(frozen=True, order=True)
class Interval:
    """Closed 1-based interval of base pairs."""

    start: int
    end: int

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError(f"interval start {self.start} exceeds end {self.end}")

    def length(self) -> int:
        return self.end - self.start + 1

    def overlap_length(self, other: "Interval") -> int:
        """Number of shared bases; zero or negative when disjoint."""
        return min(self.end, other.end) - max(self.start, other.start) + 1

    def separation(self, other: "Interval") -> int:
        """Bases strictly between the intervals; negative when they overlap."""
        return max(self.start, other.start) - min(self.end, other.end) - 1

    def contains(self, other: "Interval", margin: int = 0) -> bool:
        """True when ``other`` lies inside with ``margin`` spare bases per end."""
        return self.start + margin <= other.start and other.end <= self.end - margin


class RelationTriple(NamedTuple):
    """Boolean label (overlap, containment, interleave) of a directed edge."""

    overlap: int
    containment: int
    interleave: int

    @property
    def is_zero(self) -> bool:
        return not (self.overlap or self.containment or self.interleave)


@dataclass(frozen=True)
class RelationConfig:
    overlap_min_bp: int = 20
    containment_margin_bp: int = 5
    interleave_slack_bp: int = 5

    def __post_init__(self):
        for name in ("overlap_min_bp", "containment_margin_bp", "interleave_slack_bp"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


@dataclass(frozen=True)
class MacContigView:
    """One MAC contig as seen from a single MIC contig."""

    mac_contig_id: str
    mds_intervals: tuple[Interval, ...]
    ies_intervals: tuple[Interval, ...]

    @classmethod
    def from_intervals(cls, mac_contig_id: str, intervals: Iterable[Interval]) -> "MacContigView":
        mds = tuple(sorted(intervals))
        return cls(mac_contig_id, mds, _gaps_between(mac_contig_id, mds))


def _gaps_between(mac_contig_id: str, sorted_mds: tuple[Interval, ...]) -> tuple[Interval, ...]:
    gaps = []
    for prev, nxt in zip(sorted_mds, sorted_mds[1:]):
        if nxt.start <= prev.end + 1:
            raise InternalConsistencyError(
                f"MDS intervals of MAC contig {mac_contig_id} overlap or touch: "
                f"[{prev.start},{prev.end}] and [{nxt.start},{nxt.end}]"
            )
        gaps.append(Interval(prev.end + 1, nxt.start - 1))
    return tuple(gaps)


def ies_intervals(view: MacContigView) -> tuple[Interval, ...]:
    """Gaps between successive MDS intervals; sorts the MDSs internally."""
    return _gaps_between(view.mac_contig_id, tuple(sorted(view.mds_intervals)))


def _clean_containment(inner: Interval, outer: Interval, margin: int) -> bool:
    return outer.contains(inner, margin)


def detect_overlap(g1: MacContigView, g2: MacContigView, cfg: RelationConfig) -> bool:
    """Some MDS pair shares >= overlap_min_bp bases without clean containment."""
    return _count_overlap(g1, g2, cfg, stop_early=True) > 0


def detect_containment(g1: MacContigView, g2: MacContigView, cfg: RelationConfig) -> bool:
    """Some MDS of g1 lies inside an MDS of g2 with full margins on both ends."""
    return _count_containment(g1, g2, cfg, stop_early=True) > 0


def detect_interleave(g1: MacContigView, g2: MacContigView, cfg: RelationConfig) -> bool:
    """Some MDS of g2 sits in an IES of g1, up to the configured slack."""
    return _count_interleave(g1, g2, cfg, stop_early=True) > 0


def _count_overlap(g1, g2, cfg, stop_early=False) -> int:
    margin = cfg.containment_margin_bp
    count = 0
    for m1 in g1.mds_intervals:
        for m2 in g2.mds_intervals:
            if m1.overlap_length(m2) < cfg.overlap_min_bp:
                continue
            if _clean_containment(m1, m2, margin) or _clean_containment(m2, m1, margin):
                continue
            count += 1
            if stop_early:
                return count
    return count


def _count_containment(g1, g2, cfg, stop_early=False) -> int:
    margin = cfg.containment_margin_bp
    count = 0
    for inner in g1.mds_intervals:
        for outer in g2.mds_intervals:
            if _clean_containment(inner, outer, margin):
                count += 1
                if stop_early:
                    return count
    return count


def _count_interleave(g1, g2, cfg, stop_early=False) -> int:
    slack = cfg.interleave_slack_bp
    count = 0
    for gap in g1.ies_intervals:
        for mds in g2.mds_intervals:
            if mds.start >= gap.start - slack and mds.end <= gap.end + slack:
                count += 1
                if stop_early:
                    return count
    return count


def relation_triple(g1: MacContigView, g2: MacContigView, cfg: RelationConfig) -> RelationTriple:
    """Componentwise relation label for the ordered pair (g1, g2)."""
    return RelationTriple(
        int(detect_overlap(g1, g2, cfg)),
        int(detect_containment(g1, g2, cfg)),
        int(detect_interleave(g1, g2, cfg)),
    )


def relation_counts(g1: MacContigView, g2: MacContigView, cfg: RelationConfig) -> tuple[int, int, int]:
    """Number of satisfying MDS/IES pairs per relation, for side reports."""
    return (
        _count_overlap(g1, g2, cfg),
        _count_containment(g1, g2, cfg),
        _count_interleave(g1, g2, cfg),
    )


def contig_views(records) -> dict[str, list[MacContigView]]:
    """Group preprocessed MDS records into per-MIC lists of contig views."""
    by_mic: dict[str, dict[str, list[Interval]]] = {}
    for rec in records:
        group = by_mic.setdefault(rec.mic_contig_id, {})
        group.setdefault(rec.mac_contig_id, []).append(Interval(rec.mic_start, rec.mic_end))
    return {
        mic: [MacContigView.from_intervals(mac, ivals) for mac, ivals in sorted(group.items())]
        for mic, group in sorted(by_mic.items())
    }
