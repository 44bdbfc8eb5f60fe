"""Data model and ingestion: paper bundles, reviews, review items, and
expert annotation records.

Reviews are stored as markdown, one file per reviewer, with one ``## Item N:``
heading per review item. Structured items carry a ``#### Claim`` block (main
point + evaluation criteria) and a ``#### Evidence`` block (quote/comment
bullet pairs); pre-segmented human items may instead be free prose under the
heading. An optional ``#### Citation List`` at the end resolves bracketed
citation indices on external-reference quotes.

Annotation datasets are line-delimited JSON, one record per line, with
bit-exact label strings (see ``CORRECTNESS_LABELS`` etc.). Every record must
satisfy the cascade: significance is present iff the item is Correct, and
evidence is present iff the item is Correct and at least Marginally
Significant.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple

from .errors import (
    CascadeViolation,
    DuplicateAnnotatorItem,
    DuplicateIndex,
    InputError,
    MalformedItem,
    NonContiguousIndices,
    UnknownLabelString,
)

# Exact label vocabulary. These strings are wire format: they appear verbatim
# in annotation files and judge replies and must never be normalized.
CORRECT = "Correct"
NOT_CORRECT = "Not Correct"
SIGNIFICANT = "Significant"
MARGINALLY_SIGNIFICANT = "Marginally Significant"
NOT_SIGNIFICANT = "Not Significant"
SUFFICIENT = "Sufficient"
REQUIRES_MORE = "Requires More"

CORRECTNESS_LABELS = (CORRECT, NOT_CORRECT)
SIGNIFICANCE_LABELS = (SIGNIFICANT, MARGINALLY_SIGNIFICANT, NOT_SIGNIFICANT)
EVIDENCE_LABELS = (SUFFICIENT, REQUIRES_MORE)

REVIEWER_KINDS = ("human", "ai")

# The six review evaluation criteria, in priority order. Criteria tags on
# parsed items are normalized case-insensitively against this vocabulary;
# unknown tags are kept verbatim and surface as notices, not errors.
CRITERIA_VOCABULARY = (
    "Validity",
    "Conclusions",
    "Originality and significance",
    "Data and methodology",
    "Appropriate use of statistics and treatment of uncertainties",
    "Clarity and context",
)
_CRITERIA_BY_LOWER = {c.lower(): c for c in CRITERIA_VOCABULARY}

EVIDENCE_SOURCES = ("main_text", "supplementary", "code", "external_reference")


class ItemId(NamedTuple):
    """Identity of one review item: (paper, reviewer, 1-based index)."""

    paper_id: str
    reviewer_id: str
    index: int


@dataclass(frozen=True)
class EvidenceQuote:
    """One supporting quote with its interpretive comment.

    ``citation_link`` is present exactly when ``source`` is
    ``external_reference``; other sources never carry one.
    """

    source: str
    quote: str
    comment: str = ""
    citation_link: str | None = None

    def __post_init__(self) -> None:
        if self.source not in EVIDENCE_SOURCES:
            raise InputError(f"unknown evidence source {self.source!r}")
        if not self.quote.strip():
            raise InputError("evidence quote must be non-empty")
        if (self.source == "external_reference") != (self.citation_link is not None):
            raise InputError(
                "citation_link must be present iff source is external_reference"
            )


@dataclass(frozen=True)
class ReviewItem:
    """A single atomic criticism directed at one aspect of a paper."""

    item_id: ItemId
    title: str
    main_point: str
    criteria: tuple[str, ...] = ()
    evidence: tuple[EvidenceQuote, ...] = ()

    def __post_init__(self) -> None:
        if not self.main_point.strip():
            raise InputError(f"item {self.item_id} has an empty main point")
        if self.item_id.index < 1:
            raise InputError("item indices are 1-based")


@dataclass(frozen=True)
class Review:
    """One reviewer's full review of one paper. Zero items is legal."""

    reviewer_id: str
    reviewer_kind: str
    paper_id: str
    items: tuple[ReviewItem, ...] = ()

    def __post_init__(self) -> None:
        if self.reviewer_kind not in REVIEWER_KINDS:
            raise InputError(f"unknown reviewer kind {self.reviewer_kind!r}")
        for n, item in enumerate(self.items, start=1):
            if item.item_id.index != n:
                raise NonContiguousIndices(
                    f"review {self.reviewer_id}: item ordinals must run 1..n, "
                    f"found {item.item_id.index} at position {n}"
                )


@dataclass(frozen=True)
class AnnotationRecord:
    """One expert's cascading judgment of one review item.

    Construction enforces the cascade, so a record that exists is
    cascade-legal by definition.
    """

    item_id: ItemId
    annotator_id: str
    correctness: str
    significance: str | None = None
    evidence: str | None = None

    def __post_init__(self) -> None:
        if self.correctness not in CORRECTNESS_LABELS:
            raise UnknownLabelString(f"correctness {self.correctness!r}")
        if self.significance is not None and self.significance not in SIGNIFICANCE_LABELS:
            raise UnknownLabelString(f"significance {self.significance!r}")
        if self.evidence is not None and self.evidence not in EVIDENCE_LABELS:
            raise UnknownLabelString(f"evidence {self.evidence!r}")
        if self.correctness == CORRECT:
            if self.significance is None:
                raise CascadeViolation(
                    f"{self.item_id}: Correct items require a significance label"
                )
            needs_evidence = self.significance in (SIGNIFICANT, MARGINALLY_SIGNIFICANT)
            if needs_evidence and self.evidence is None:
                raise CascadeViolation(
                    f"{self.item_id}: items at least Marginally Significant "
                    "require an evidence label"
                )
            if not needs_evidence and self.evidence is not None:
                raise CascadeViolation(
                    f"{self.item_id}: Not Significant items must not carry "
                    "an evidence label"
                )
        else:
            if self.significance is not None or self.evidence is not None:
                raise CascadeViolation(
                    f"{self.item_id}: Not Correct items must not carry "
                    "significance or evidence labels"
                )


@dataclass(frozen=True)
class PaperBundle:
    """A paper's source material: preprint text, figures, optional
    supplementary blobs and code files."""

    paper_id: str
    preprint_text: str
    figures: tuple[tuple[str, str], ...] = ()  # (filename, caption)
    supplementary: tuple[tuple[str, str], ...] = ()  # (name, text)
    code_files: tuple[tuple[str, str], ...] = ()  # (relative path, text)


@dataclass
class ValidationReport:
    """Outcome of bundle validation; violations are reported, not raised."""

    errors: list[str] = field(default_factory=list)
    notices: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


# ---------------------------------------------------------------------------
# Review markdown parsing
# ---------------------------------------------------------------------------

_ITEM_HEADING = re.compile(r"^##\s+Item\s+(\d+)\s*:?\s*(.*)$")
_SUBHEADING = re.compile(r"^####\s+(.+?)\s*$")
_BULLET = re.compile(r"^([ \t]*)[*-]\s+(.*)$")
_QUOTE_BULLET = re.compile(r"^Quote(?:\s+\d+)?\s*(\(([^)]*)\))?\s*(\[(\d+)\])?\s*:\s*(.*)$", re.DOTALL)
_COMMENT_BULLET = re.compile(r"^Comment\s*:\s*(.*)$", re.DOTALL)
_MAIN_POINT_BULLET = re.compile(r"^Main point(?: of criticism)?\s*:\s*(.*)$", re.DOTALL)
_CRITERIA_BULLET = re.compile(r"^Evaluation criteri(?:a|on)\s*:\s*(.*)$", re.DOTALL)
_CITATION_ENTRY = re.compile(r"^\[(\d+)\]\s*(.*)$")
_CITATION_HEADING = re.compile(r"^####\s+Citation List\s*$", re.IGNORECASE)
_URL = re.compile(r"https?://\S+")
_TRAILING_INDEX = re.compile(r"\s*\[(\d+)\]\s*$")


def _infer_source(annotation: str | None, has_citation: bool) -> str:
    if annotation:
        lowered = annotation.lower()
        if "supplement" in lowered:
            return "supplementary"
        if "code" in lowered:
            return "code"
        if "external" in lowered or "reference" in lowered:
            return "external_reference"
        if "main" in lowered:
            return "main_text"
    return "external_reference" if has_citation else "main_text"


def _strip_fence(text: str) -> str:
    """Remove one surrounding code fence, if the whole block is fenced."""
    lines = text.split("\n")
    if len(lines) >= 2 and lines[0].startswith("```") and lines[-1].strip() == "```":
        return "\n".join(lines[1:-1])
    return text


def _split_bullets(lines: list[str]) -> list[tuple[int, str]]:
    """Group lines into (indent, text) bullets; continuation lines attach to
    the preceding bullet."""
    bullets: list[tuple[int, str]] = []
    for line in lines:
        m = _BULLET.match(line)
        if m and not line.lstrip().startswith("```"):
            indent = len(m.group(1).expandtabs(4))
            bullets.append((indent, m.group(2)))
        elif bullets:
            bullets[-1] = (bullets[-1][0], bullets[-1][1] + "\n" + line)
        elif line.strip():
            # Prose before any bullet inside a block: treat as a bullet-less
            # fragment so claim text without the leading marker still parses.
            bullets.append((0, line))
    return bullets


def _parse_criteria(raw: str, notices: list[str]) -> tuple[str, ...]:
    parts = [p.strip() for p in raw.split(";")] if ";" in raw else [p.strip() for p in raw.split(",")]
    criteria = []
    for part in parts:
        if not part:
            continue
        canonical = _CRITERIA_BY_LOWER.get(part.lower())
        if canonical is None:
            notices.append(f"unknown criterion tag {part!r} kept verbatim")
            criteria.append(part)
        else:
            criteria.append(canonical)
    return tuple(criteria)


def _parse_evidence(
    lines: list[str],
    citations: dict[int, str],
    item_label: str,
) -> tuple[EvidenceQuote, ...]:
    quotes: list[EvidenceQuote] = []
    pending: dict | None = None

    def flush() -> None:
        nonlocal pending
        if pending is None:
            return
        quote_text = _strip_fence(pending["quote"].strip())
        link = pending["link"]
        source = pending["source"]
        if source == "external_reference" and link is None:
            # An external quote must resolve somewhere; fall back to the
            # annotation text so the invariant stays satisfiable.
            raise MalformedItem(
                f"{item_label}: external-reference quote has no resolvable "
                "citation index"
            )
        quotes.append(
            EvidenceQuote(
                source=source,
                quote=quote_text,
                comment=pending["comment"].strip(),
                citation_link=link,
            )
        )
        pending = None

    for indent, text in _split_bullets(lines):
        qm = _QUOTE_BULLET.match(text)
        cm = _COMMENT_BULLET.match(text)
        if qm and indent == 0:
            flush()
            annotation = qm.group(2)
            index = qm.group(4)
            body = qm.group(5)
            if index is None:
                tail = _TRAILING_INDEX.search(body)
                if tail:
                    index = tail.group(1)
                    body = body[: tail.start()]
            link = None
            if index is not None:
                entry = citations.get(int(index))
                if entry is not None:
                    url = _URL.search(entry)
                    link = url.group(0).rstrip(").,;") if url else entry
            source = _infer_source(annotation, index is not None)
            if source != "external_reference":
                link = None
            pending = {"quote": body, "comment": "", "source": source, "link": link}
        elif cm and pending is not None:
            pending["comment"] = cm.group(1)
        elif pending is not None:
            # Continuation fragment (e.g. a stray nested bullet).
            pending["quote"] += "\n" + text
    flush()
    return tuple(quotes)


def _parse_citations(lines: list[str]) -> dict[int, str]:
    citations: dict[int, str] = {}
    current: int | None = None
    for line in lines:
        m = _CITATION_ENTRY.match(line.strip())
        if m:
            current = int(m.group(1))
            citations[current] = m.group(2).strip()
        elif current is not None and line.strip():
            citations[current] += " " + line.strip()
    return citations


def parse_review_markdown(
    text: str,
    *,
    paper_id: str = "",
    reviewer_id: str = "",
    reviewer_kind: str = "ai",
    notices: list[str] | None = None,
) -> Review:
    """Parse one reviewer's markdown file into a ``Review``.

    Raises ``MalformedItem`` for an item heading without a usable claim,
    ``DuplicateIndex``/``NonContiguousIndices`` for bad item numbering.
    Zero ``## Item`` headings yield an empty review.
    """
    if notices is None:
        notices = []
    lines = text.split("\n")

    # Lift the citation list out first; it is shared across items.
    citation_lines: list[str] = []
    body_lines: list[str] = []
    in_citations = False
    for line in lines:
        if _CITATION_HEADING.match(line):
            in_citations = True
            continue
        if in_citations and (line.startswith("## ") or line.startswith("#### ")):
            in_citations = False
        (citation_lines if in_citations else body_lines).append(line)
    citations = _parse_citations(citation_lines)

    # Split into per-item sections.
    sections: list[tuple[int, str, list[str]]] = []
    current_section: list[str] | None = None
    for line in body_lines:
        m = _ITEM_HEADING.match(line)
        if m:
            current_section = []
            sections.append((int(m.group(1)), m.group(2).strip(), current_section))
        elif current_section is not None:
            current_section.append(line)

    seen: set[int] = set()
    for pos, (number, _, _) in enumerate(sections, start=1):
        if number in seen:
            raise DuplicateIndex(f"item number {number} appears twice")
        seen.add(number)
        if number != pos:
            raise NonContiguousIndices(
                f"item numbers must run 1..n in order; found {number} at "
                f"position {pos}"
            )

    items = []
    for number, heading_title, section in sections:
        items.append(
            _parse_item(
                number, heading_title, section, citations,
                paper_id=paper_id, reviewer_id=reviewer_id,
                reviewer_kind=reviewer_kind, notices=notices,
            )
        )
    return Review(
        reviewer_id=reviewer_id,
        reviewer_kind=reviewer_kind,
        paper_id=paper_id,
        items=tuple(items),
    )


def _parse_item(
    number: int,
    heading_title: str,
    section: list[str],
    citations: dict[int, str],
    *,
    paper_id: str,
    reviewer_id: str,
    reviewer_kind: str,
    notices: list[str],
) -> ReviewItem:
    label = f"item {number}"
    blocks: dict[str, list[str]] = {}
    preamble: list[str] = []
    current: list[str] = preamble
    for line in section:
        m = _SUBHEADING.match(line)
        if m:
            current = blocks.setdefault(m.group(1).strip().lower(), [])
        else:
            current.append(line)

    item_id = ItemId(paper_id, reviewer_id, number)

    if not blocks:
        # Pre-segmented prose item (human reviews). First line becomes the
        # title when the heading carries none; the remainder is the main
        # point. A single-line item doubles as its own main point.
        prose = [ln for ln in (l.rstrip() for l in preamble) if ln]
        if not prose:
            raise MalformedItem(f"{label}: no claim block and no body text")
        if heading_title:
            title, body = heading_title, "\n".join(prose)
        else:
            title, body = prose[0], "\n".join(prose[1:]) or prose[0]
        return ReviewItem(item_id=item_id, title=title, main_point=body)

    claim = blocks.get("claim")
    if claim is None:
        raise MalformedItem(f"{label}: has structured blocks but no Claim block")

    main_point = ""
    criteria: tuple[str, ...] = ()
    for _, text in _split_bullets(claim):
        mp = _MAIN_POINT_BULLET.match(text)
        cr = _CRITERIA_BULLET.match(text)
        if mp:
            main_point = mp.group(1).strip()
        elif cr:
            criteria = _parse_criteria(cr.group(1).strip(), notices)
    if not main_point:
        raise MalformedItem(f"{label}: Claim block has no main point")
    if reviewer_kind == "ai" and not criteria:
        raise MalformedItem(f"{label}: AI items must carry evaluation criteria")

    evidence = _parse_evidence(blocks.get("evidence", []), citations, label)
    return ReviewItem(
        item_id=item_id,
        title=heading_title,
        main_point=main_point,
        criteria=criteria,
        evidence=evidence,
    )


# ---------------------------------------------------------------------------
# Review serialization (parse -> serialize -> parse is a fixed point)
# ---------------------------------------------------------------------------

_SOURCE_ANNOTATION = {
    "main_text": "from main text",
    "supplementary": "from supplementary materials",
    "code": "from submitted source code",
    "external_reference": "from external reference",
}


def serialize_review(review: Review) -> str:
    """Render a ``Review`` back to item markdown.

    External-reference quotes are numbered into a trailing citation list in
    order of first appearance.
    """
    out: list[str] = []
    citation_order: list[str] = []

    def citation_index(link: str) -> int:
        if link not in citation_order:
            citation_order.append(link)
        return citation_order.index(link) + 1

    for item in review.items:
        out.append(f"## Item {item.item_id.index}: {item.title}".rstrip())
        out.append("")
        structured = bool(item.criteria or item.evidence)
        if structured:
            out.append("#### Claim")
            out.append(f"* Main point of criticism: {item.main_point}")
            out.append(f"* Evaluation criteria: {'; '.join(item.criteria)}")
            out.append("")
            out.append("#### Evidence")
            for quote in item.evidence:
                annotation = _SOURCE_ANNOTATION[quote.source]
                marker = ""
                if quote.source == "external_reference":
                    marker = f" [{citation_index(quote.citation_link or '')}]"
                if "\n" in quote.quote or quote.source == "code":
                    out.append(f"* Quote ({annotation}){marker}:")
                    out.append("```")
                    out.append(quote.quote)
                    out.append("```")
                else:
                    out.append(f"* Quote ({annotation}){marker}: {quote.quote}")
                if quote.comment:
                    out.append(f"   * Comment: {quote.comment}")
        else:
            if item.main_point != item.title:
                out.append(item.main_point)
        out.append("")
        out.append("")

    if citation_order:
        out.append("#### Citation List")
        for n, link in enumerate(citation_order, start=1):
            out.append(f"[{n}] {link}")
        out.append("")
    return "\n".join(out)


# ---------------------------------------------------------------------------
# Annotation dataset loading
# ---------------------------------------------------------------------------

_ANNOTATION_FIELDS = {
    "paper_id", "reviewer_id", "reviewer_kind", "item_index",
    "annotator_id", "correctness", "significance", "evidence",
}


@dataclass
class AnnotationDataset:
    """Annotation records grouped by paper, plus reviewer-kind lookup."""

    by_paper: dict[str, list[AnnotationRecord]]
    reviewer_kinds: dict[tuple[str, str], str]

    @property
    def papers(self) -> list[str]:
        return sorted(self.by_paper)

    def records_by_item(self, paper_id: str) -> dict[ItemId, list[AnnotationRecord]]:
        grouped: dict[ItemId, list[AnnotationRecord]] = {}
        for record in self.by_paper.get(paper_id, []):
            grouped.setdefault(record.item_id, []).append(record)
        return grouped

    def items_by_reviewer(self, paper_id: str) -> dict[str, list[ItemId]]:
        by_reviewer: dict[str, set[ItemId]] = {}
        for record in self.by_paper.get(paper_id, []):
            by_reviewer.setdefault(record.item_id.reviewer_id, set()).add(record.item_id)
        return {
            reviewer: sorted(ids, key=lambda i: i.index)
            for reviewer, ids in sorted(by_reviewer.items())
        }

    def human_reviewers(self, paper_id: str) -> list[str]:
        return sorted(
            reviewer for (paper, reviewer), kind in self.reviewer_kinds.items()
            if paper == paper_id and kind == "human"
        )

    def dual_annotated_papers(self) -> list[str]:
        """Papers where every item carries records from two annotators."""
        result = []
        for paper in self.papers:
            groups = self.records_by_item(paper).values()
            if groups and all(len(g) >= 2 for g in groups):
                result.append(paper)
        return result


def parse_annotation_line(obj: dict, where: str = "") -> tuple[AnnotationRecord, str]:
    """Validate one parsed JSON record; returns (record, reviewer_kind)."""
    missing = _ANNOTATION_FIELDS - set(obj)
    if missing:
        raise InputError(f"{where}missing fields {sorted(missing)}")
    kind = obj["reviewer_kind"]
    if kind not in REVIEWER_KINDS:
        raise UnknownLabelString(f"{where}reviewer_kind {kind!r}")
    index = obj["item_index"]
    if not isinstance(index, int) or index < 1:
        raise InputError(f"{where}item_index must be an integer >= 1")
    item_id = ItemId(str(obj["paper_id"]), str(obj["reviewer_id"]), index)
    try:
        record = AnnotationRecord(
            item_id=item_id,
            annotator_id=str(obj["annotator_id"]),
            correctness=obj["correctness"],
            significance=obj["significance"],
            evidence=obj["evidence"],
        )
    except (CascadeViolation, UnknownLabelString) as exc:
        raise type(exc)(f"{where}{exc}") from None
    return record, kind


def load_annotation_dataset(path: str | Path) -> AnnotationDataset:
    """Load a line-delimited annotation file, validating every record.

    Errors carry the offending line number. Duplicate (item, annotator)
    pairs are rejected.
    """
    by_paper: dict[str, list[AnnotationRecord]] = {}
    kinds: dict[tuple[str, str], str] = {}
    seen: set[tuple[ItemId, str]] = set()
    raw = Path(path).read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise InputError(f"{path}: not valid UTF-8 ({exc})") from None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        where = f"{path}:{lineno}: "
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise InputError(f"{where}invalid JSON ({exc.msg})") from None
        record, kind = parse_annotation_line(obj, where)
        key = (record.item_id, record.annotator_id)
        if key in seen:
            raise DuplicateAnnotatorItem(
                f"{where}duplicate record for {record.item_id} by "
                f"{record.annotator_id}"
            )
        seen.add(key)
        prior = kinds.setdefault((record.item_id.paper_id, record.item_id.reviewer_id), kind)
        if prior != kind:
            raise InputError(
                f"{where}reviewer {record.item_id.reviewer_id} changes kind "
                f"from {prior} to {kind}"
            )
        by_paper.setdefault(record.item_id.paper_id, []).append(record)
    return AnnotationDataset(by_paper=by_paper, reviewer_kinds=kinds)


def dump_annotation_record(record: AnnotationRecord, reviewer_kind: str) -> str:
    """Serialize one record to its line-delimited JSON form."""
    return json.dumps(
        {
            "paper_id": record.item_id.paper_id,
            "reviewer_id": record.item_id.reviewer_id,
            "reviewer_kind": reviewer_kind,
            "item_index": record.item_id.index,
            "annotator_id": record.annotator_id,
            "correctness": record.correctness,
            "significance": record.significance,
            "evidence": record.evidence,
        },
        sort_keys=True,
    )


# ---------------------------------------------------------------------------
# Paper bundles
# ---------------------------------------------------------------------------

def load_paper_bundle(root: str | Path, paper_id: str | None = None) -> PaperBundle:
    """Load a bundle from the on-disk layout::

        <root>/preprint/preprint.md
        <root>/preprint/images_list.json   [{"filename": ..., "caption": ...}]
        <root>/preprint/images/
        <root>/preprint/supplementary/     (optional)
        <root>/preprint/code/              (optional)
    """
    root = Path(root)
    preprint_dir = root / "preprint"
    preprint_path = preprint_dir / "preprint.md"
    if not preprint_path.is_file():
        raise InputError(f"{root}: no preprint/preprint.md")
    try:
        text = preprint_path.read_bytes().decode("utf-8")
    except UnicodeDecodeError as exc:
        raise InputError(f"{preprint_path}: not valid UTF-8 ({exc})") from None

    figures: list[tuple[str, str]] = []
    images_list = preprint_dir / "images_list.json"
    if images_list.is_file():
        try:
            entries = json.loads(images_list.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise InputError(f"{images_list}: invalid JSON ({exc.msg})") from None
        for entry in entries:
            figures.append((str(entry["filename"]), str(entry.get("caption", ""))))

    def read_dir(name: str) -> tuple[tuple[str, str], ...]:
        directory = preprint_dir / name
        if not directory.is_dir():
            return ()
        blobs = []
        for file in sorted(p for p in directory.rglob("*") if p.is_file()):
            rel = file.relative_to(directory).as_posix()
            blobs.append((rel, file.read_text(encoding="utf-8", errors="replace")))
        return tuple(blobs)

    return PaperBundle(
        paper_id=paper_id or root.name,
        preprint_text=text,
        figures=tuple(figures),
        supplementary=read_dir("supplementary"),
        code_files=read_dir("code"),
    )


def validate_bundle(bundle: PaperBundle) -> ValidationReport:
    """Check bundle invariants; missing optional parts are notices."""
    report = ValidationReport()
    if not bundle.paper_id:
        report.errors.append("paper_id is empty")
    if not bundle.preprint_text.strip():
        report.errors.append("preprint text is empty")
    seen_figures: set[str] = set()
    for filename, _ in bundle.figures:
        if filename in seen_figures:
            report.errors.append(f"duplicate figure filename {filename!r}")
        seen_figures.add(filename)
    if not bundle.supplementary:
        report.notices.append("no supplementary materials")
    if not bundle.code_files:
        report.notices.append("no code")
    if not bundle.figures:
        report.notices.append("no figures")
    return report


def bundle_context_text(bundle: PaperBundle) -> str:
    """Flatten a bundle into judge context text, preprint first."""
    parts = [bundle.preprint_text]
    if bundle.figures:
        captions = "\n".join(f"{name}: {caption}" for name, caption in bundle.figures)
        parts.append("Figures:\n" + captions)
    for name, text in bundle.supplementary:
        parts.append(f"Supplementary {name}:\n{text}")
    for path, text in bundle.code_files:
        parts.append(f"Code {path}:\n{text}")
    return "\n\n".join(parts)


def iter_review_files(reviews_dir: str | Path, paper_id: str) -> Iterable[tuple[str, Path]]:
    """Yield (reviewer_id, path) for every ``<reviewer_id>.md`` of a paper."""
    paper_dir = Path(reviews_dir) / paper_id
    if not paper_dir.is_dir():
        return
    for path in sorted(paper_dir.glob("*.md")):
        yield path.stem, path


def load_review_file(
    path: str | Path,
    *,
    paper_id: str,
    reviewer_id: str,
    reviewer_kind: str,
    notices: list[str] | None = None,
) -> Review:
    raw = Path(path).read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise InputError(f"{path}: not valid UTF-8 ({exc})") from None
    return parse_review_markdown(
        text,
        paper_id=paper_id,
        reviewer_id=reviewer_id,
        reviewer_kind=reviewer_kind,
        notices=notices,
    )
