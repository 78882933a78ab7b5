"""Parsing and preprocessing of MIC-MAC segment annotation files.

The native input format is UTF-8 text with one record per line and six
tab-separated columns::

    mic_contig_id  MDS  start  end  strand  mac=<id>;idx=<n>

Coordinates are 1-based inclusive, the strand is ``+`` (forward) or
``-`` (inverted), and lines starting with ``#`` are comments.  Standard
9-column GFF3 is accepted through ``gff3=True``: column 1 is the MIC
contig, columns 4/5/7 are start/end/strand, and the attribute column
must carry ``Parent`` (the MAC contig) and an ``ID`` whose trailing
digits give the segment index; non-MDS feature lines are skipped.

Preprocessing applies two rules.  Consecutive segments of one MAC contig
that overlap or lie within ``merge_gap_max`` bases of each other in the
MIC are merged into one record, and group indices are renumbered 1..k;
merging repeats until stable, so the operation is idempotent.  A MAC
contig owning two segments with index difference >= 2 whose MIC
intervals overlap by at least one base is dropped entirely.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterable

from .errors import DuplicateRecordError, ParseError

__all__ = [
    "FORWARD",
    "INVERTED",
    "MdsRecord",
    "AnnotationSet",
    "IngestConfig",
    "parse_annotation",
    "serialize_annotation",
    "merge_consecutive_mds",
    "exclude_distant_overlap_contigs",
    "preprocess",
]

FORWARD = "forward"
INVERTED = "inverted"

_STRANDS = {"+": FORWARD, "-": INVERTED}
_ID_INDEX = re.compile(r"(\d+)\s*$")


@dataclass(frozen=True)
class MdsRecord:
    """One macronuclear-destined segment located on a MIC contig."""

    mic_contig_id: str
    mac_contig_id: str
    mds_index: int
    mic_start: int
    mic_end: int
    orientation: str

    def __post_init__(self):
        if self.mic_start > self.mic_end:
            raise ValueError(f"mic_start {self.mic_start} exceeds mic_end {self.mic_end}")
        if self.mds_index < 1:
            raise ValueError(f"mds_index must be >= 1, got {self.mds_index}")
        if self.orientation not in (FORWARD, INVERTED):
            raise ValueError(f"invalid orientation: {self.orientation}")

    @property
    def key(self) -> tuple[str, str, int]:
        return (self.mic_contig_id, self.mac_contig_id, self.mds_index)


@dataclass
class AnnotationSet:
    records: list[MdsRecord]
    provenance: str = ""
    preprocessing_log: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class IngestConfig:
    merge_gap_max: int = 0
    exclude_distant_overlap: bool = True

    def __post_init__(self):
        if self.merge_gap_max < 0:
            raise ValueError("merge_gap_max must be >= 0")


def parse_annotation(
    text: str | Iterable[str],
    config: IngestConfig | None = None,
    *,
    provenance: str = "",
    gff3: bool = False,
) -> AnnotationSet:
    """Parse annotation text into individually validated records.

    Records are not validated against each other beyond uniqueness of the
    (MIC contig, MAC contig, index) key.
    """
    del config  # parsing itself is configuration-free
    lines = text.splitlines() if isinstance(text, str) else text
    records: list[MdsRecord] = []
    seen: dict[tuple[str, str, int], int] = {}
    for line_number, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parsed = _parse_gff3_line(line, line_number) if gff3 else _parse_native_line(line, line_number)
        if parsed is None:
            continue
        if parsed.key in seen:
            raise DuplicateRecordError(
                f"duplicate record for MIC {parsed.mic_contig_id}, MAC "
                f"{parsed.mac_contig_id}, index {parsed.mds_index} "
                f"(first seen on line {seen[parsed.key]})",
                line_number,
            )
        seen[parsed.key] = line_number
        records.append(parsed)
    return AnnotationSet(records=records, provenance=provenance)


def _parse_native_line(line: str, line_number: int) -> MdsRecord:
    cols = line.split("\t")
    if len(cols) != 6:
        raise ParseError(f"expected 6 tab-separated columns, got {len(cols)}", line_number)
    mic, feature, start_text, end_text, strand, attr_text = cols
    if feature != "MDS":
        raise ParseError(f"feature type must be 'MDS', got {feature!r}", line_number)
    start = _parse_int(start_text, "start", line_number)
    end = _parse_int(end_text, "end", line_number)
    if strand not in _STRANDS:
        raise ParseError(f"strand must be '+' or '-', got {strand!r}", line_number)
    attrs = _parse_attributes(attr_text, line_number)
    if "mac" not in attrs or "idx" not in attrs:
        raise ParseError("attributes must contain 'mac' and 'idx'", line_number)
    index = _parse_int(attrs["idx"], "idx", line_number)
    return _build_record(mic, attrs["mac"], index, start, end, _STRANDS[strand], line_number)


def _parse_gff3_line(line: str, line_number: int) -> MdsRecord | None:
    cols = line.split("\t")
    if len(cols) != 9:
        raise ParseError(f"expected 9 tab-separated GFF3 columns, got {len(cols)}", line_number)
    if cols[2] != "MDS":
        return None
    mic = cols[0]
    start = _parse_int(cols[3], "start", line_number)
    end = _parse_int(cols[4], "end", line_number)
    strand = cols[6]
    if strand not in _STRANDS:
        raise ParseError(f"strand must be '+' or '-', got {strand!r}", line_number)
    attrs = _parse_attributes(cols[8], line_number)
    if "Parent" not in attrs:
        raise ParseError("GFF3 attributes must contain 'Parent'", line_number)
    id_value = attrs.get("ID", "")
    match = _ID_INDEX.search(id_value)
    if not match:
        raise ParseError(f"GFF3 'ID' must end in the segment index, got {id_value!r}", line_number)
    index = int(match.group(1))
    return _build_record(mic, attrs["Parent"], index, start, end, _STRANDS[strand], line_number)


def _build_record(mic, mac, index, start, end, orientation, line_number) -> MdsRecord:
    if end < start:
        raise ParseError(f"end {end} precedes start {start}", line_number)
    if index < 1:
        raise ParseError(f"segment index must be >= 1, got {index}", line_number)
    return MdsRecord(mic, mac, index, start, end, orientation)


def _parse_int(text: str, what: str, line_number: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"non-numeric {what}: {text!r}", line_number) from None


def _parse_attributes(text: str, line_number: int) -> dict[str, str]:
    attrs: dict[str, str] = {}
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "=" not in chunk:
            raise ParseError(f"malformed attribute {chunk!r}", line_number)
        key, value = chunk.split("=", 1)
        attrs[key.strip()] = value.strip()
    return attrs


def serialize_annotation(annotation: AnnotationSet) -> str:
    """Render records back into the native 6-column format."""
    strand_of = {FORWARD: "+", INVERTED: "-"}
    lines = [
        "\t".join(
            (
                rec.mic_contig_id,
                "MDS",
                str(rec.mic_start),
                str(rec.mic_end),
                strand_of[rec.orientation],
                f"mac={rec.mac_contig_id};idx={rec.mds_index}",
            )
        )
        for rec in annotation.records
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def merge_consecutive_mds(annotation: AnnotationSet, config: IngestConfig) -> AnnotationSet:
    """Merge index-consecutive segments that overlap or nearly touch in the MIC.

    Runs merge passes followed by renumbering until a pass changes nothing,
    which makes the operation idempotent even on groups whose original
    indices had gaps.
    """
    log = list(annotation.preprocessing_log)
    groups: dict[tuple[str, str], list[MdsRecord]] = {}
    for rec in annotation.records:
        groups.setdefault((rec.mic_contig_id, rec.mac_contig_id), []).append(rec)

    out: list[MdsRecord] = []
    for (mic, mac), recs in sorted(groups.items()):
        recs = sorted(recs, key=lambda r: r.mds_index)
        while True:
            recs, merged_any = _merge_pass(mic, mac, recs, config.merge_gap_max, log)
            renumbered = [replace(r, mds_index=i) for i, r in enumerate(recs, start=1)]
            # renumbering can make surviving records index-consecutive, so the
            # pass repeats until neither merging nor renumbering changes anything
            if not merged_any and renumbered == recs:
                break
            recs = renumbered
        out.extend(recs)

    out.sort(key=lambda r: r.key)
    return AnnotationSet(records=out, provenance=annotation.provenance, preprocessing_log=log)


def _merge_pass(mic, mac, recs, gap_max, log) -> tuple[list[MdsRecord], bool]:
    merged: list[MdsRecord] = []
    changed = False
    current = recs[0]
    current_max_index = current.mds_index
    for nxt in recs[1:]:
        near = max(current.mic_start, nxt.mic_start) - min(current.mic_end, nxt.mic_end) - 1 <= gap_max
        if nxt.mds_index == current_max_index + 1 and near:
            span = (min(current.mic_start, nxt.mic_start), max(current.mic_end, nxt.mic_end))
            if nxt.orientation != current.orientation:
                log.append(
                    f"orientation conflict in {mic}/{mac}: MDS {current.mds_index} "
                    f"({current.orientation}) absorbs MDS {nxt.mds_index} ({nxt.orientation})"
                )
            log.append(
                f"merge {mic}/{mac}: MDS {current.mds_index}+{nxt.mds_index} -> [{span[0]},{span[1]}]"
            )
            current = replace(current, mic_start=span[0], mic_end=span[1])
            current_max_index = nxt.mds_index
            changed = True
        else:
            merged.append(current)
            current = nxt
            current_max_index = nxt.mds_index
    merged.append(current)
    return merged, changed


def exclude_distant_overlap_contigs(annotation: AnnotationSet) -> AnnotationSet:
    """Drop MAC contigs whose non-consecutive segments overlap in a MIC contig."""
    log = list(annotation.preprocessing_log)
    groups: dict[tuple[str, str], list[MdsRecord]] = {}
    for rec in annotation.records:
        groups.setdefault((rec.mic_contig_id, rec.mac_contig_id), []).append(rec)

    doomed: set[str] = set()
    for (mic, mac), recs in sorted(groups.items()):
        recs = sorted(recs, key=lambda r: r.mds_index)
        for i, a in enumerate(recs):
            for b in recs[i + 1 :]:
                if b.mds_index - a.mds_index < 2:
                    continue
                shared = min(a.mic_end, b.mic_end) - max(a.mic_start, b.mic_start) + 1
                if shared >= 1 and mac not in doomed:
                    doomed.add(mac)
                    log.append(
                        f"exclude MAC contig {mac}: MDS {a.mds_index} and {b.mds_index} "
                        f"overlap by {shared} bp in {mic}"
                    )
    kept = [rec for rec in annotation.records if rec.mac_contig_id not in doomed]
    return AnnotationSet(records=kept, provenance=annotation.provenance, preprocessing_log=log)


def preprocess(annotation: AnnotationSet, config: IngestConfig) -> AnnotationSet:
    """Apply the merge rule and, when enabled, the distant-overlap exclusion."""
    result = merge_consecutive_mds(annotation, config)
    if config.exclude_distant_overlap:
        result = exclude_distant_overlap_contigs(result)
    return result
