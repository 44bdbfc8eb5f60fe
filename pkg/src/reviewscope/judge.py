"""Pluggable judge interface for similarity classification and meta-review
labeling.

A ``Judge`` renders a prompt template, consults an on-disk verdict cache,
dispatches to a backend (deterministic mock or remote HTTP chat endpoint)
with bounded retries, parses the structured reply, and validates it.
Request hashes are stable digests over the canonicalized request, so equal
logical requests share one cache entry regardless of process, platform, or
pair orientation. Template ids embed a digest of the template text, so
editing a template invalidates its cached verdicts.

The remote backend speaks a minimal chat-style contract: POST to the
endpoint with a bearer token, a model name, one user message, and
temperature 0; the reply text is expected to contain a single JSON object.
Configuration comes from the environment: ``REVIEWSCOPE_JUDGE_URL``,
``REVIEWSCOPE_JUDGE_TOKEN``, ``REVIEWSCOPE_JUDGE_MODEL``.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Mapping

import requests

from .corpus import (
    CORRECT,
    CORRECTNESS_LABELS,
    EVIDENCE_LABELS,
    MARGINALLY_SIGNIFICANT,
    NOT_CORRECT,
    NOT_SIGNIFICANT,
    SIGNIFICANCE_LABELS,
    SIGNIFICANT,
    SUFFICIENT,
    AnnotationRecord,
    ItemId,
    ReviewItem,
)
from .errors import (
    CascadeViolation,
    ContextOverflow,
    InconsistentPrediction,
    InputError,
    TransportFailure,
    UnknownLabelString,
    UnparseableResponse,
)
from .rubric import JOINT_CLASS_LABELS

ENV_URL = "REVIEWSCOPE_JUDGE_URL"
ENV_TOKEN = "REVIEWSCOPE_JUDGE_TOKEN"
ENV_MODEL = "REVIEWSCOPE_JUDGE_MODEL"

DEFAULT_RETRIES = 5
DEFAULT_CONTEXT_BUDGET = 60_000  # characters of paper context, head first
MAX_PROMPT_CHARS = 400_000


# ---------------------------------------------------------------------------
# Requests and hashing
# ---------------------------------------------------------------------------

def item_payload(item: ReviewItem) -> dict:
    """Canonical JSON form of a review item for judging and hashing."""
    return {
        "item_id": list(item.item_id),
        "title": item.title,
        "main_point": item.main_point,
        "criteria": list(item.criteria),
        "evidence": [
            {
                "source": q.source,
                "quote": q.quote,
                "comment": q.comment,
                "citation_link": q.citation_link,
            }
            for q in item.evidence
        ],
    }


@dataclass(frozen=True)
class JudgeRequest:
    """One logical judging request.

    ``payload`` is a pair of review items (similarity) or a single item
    (meta_review). The similarity payload is canonicalized by sorting the
    pair on item id, so both orientations hash identically.
    """

    kind: str  # "similarity" | "meta_review"
    payload: tuple[ReviewItem, ...]
    paper_context: str
    template_id: str

    def __post_init__(self) -> None:
        if self.kind not in ("similarity", "meta_review"):
            raise InputError(f"unknown judge request kind {self.kind!r}")
        expected = 2 if self.kind == "similarity" else 1
        if len(self.payload) != expected:
            raise InputError(
                f"{self.kind} requests carry {expected} item(s), "
                f"got {len(self.payload)}"
            )

    def canonical_payload(self) -> list[dict]:
        payloads = [item_payload(i) for i in self.payload]
        if self.kind == "similarity":
            payloads.sort(key=lambda p: p["item_id"])
        return payloads

    @property
    def request_hash(self) -> str:
        return cache_key(self)


def cache_key(req: JudgeRequest) -> str:
    """Collision-resistant digest over the canonicalized request.

    Stable across processes and platforms; any change to the kind,
    template, payload, or context changes the digest.
    """
    context_digest = hashlib.sha256(req.paper_context.encode("utf-8")).hexdigest()
    canonical = json.dumps(
        {
            "kind": req.kind,
            "template_id": req.template_id,
            "payload": req.canonical_payload(),
            "context_digest": context_digest,
        },
        sort_keys=True,
        ensure_ascii=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class JudgeVerdict:
    """A parsed backend reply: ordinal for similarity, axis labels plus the
    joint-class prediction for meta review."""

    kind: str
    raw_response: str
    latency: float
    ordinal: int | None = None
    correctness: str | None = None
    significance: str | None = None
    evidence: str | None = None
    prediction: str | None = None

    def annotation_record(self, item_id: ItemId, annotator_id: str) -> AnnotationRecord:
        if self.kind != "meta_review":
            raise InputError("only meta_review verdicts carry axis labels")
        return AnnotationRecord(
            item_id=item_id,
            annotator_id=annotator_id,
            correctness=self.correctness or "",
            significance=self.significance,
            evidence=self.evidence,
        )


# ---------------------------------------------------------------------------
# Templates
# ---------------------------------------------------------------------------

class TemplateSet:
    """Prompt templates by name, searched in an optional override directory
    before the packaged defaults. Versioned ids embed a content digest."""

    def __init__(self, template_dir: str | Path | None = None):
        self._dir = Path(template_dir) if template_dir else None
        self._cache: dict[str, str] = {}

    def text(self, name: str) -> str:
        if name not in self._cache:
            if self._dir is not None and (self._dir / f"{name}.txt").is_file():
                raw = (self._dir / f"{name}.txt").read_text(encoding="utf-8")
            else:
                try:
                    raw = (
                        resources.files("reviewscope.templates")
                        .joinpath(f"{name}.txt")
                        .read_text(encoding="utf-8")
                    )
                except FileNotFoundError:
                    raise InputError(f"no template named {name!r}") from None
            self._cache[name] = raw
        return self._cache[name]

    def versioned_id(self, name: str) -> str:
        digest = hashlib.sha256(self.text(name).encode("utf-8")).hexdigest()[:12]
        return f"{name}@{digest}"


def _render_item(item: ReviewItem) -> str:
    parts = [f"Title: {item.title}", f"Main point: {item.main_point}"]
    if item.criteria:
        parts.append(f"Criteria: {'; '.join(item.criteria)}")
    for n, q in enumerate(item.evidence, start=1):
        parts.append(f"Evidence {n} ({q.source}): {q.quote}")
        if q.comment:
            parts.append(f"  Comment: {q.comment}")
    return "\n".join(parts)


def truncate_context(context: str, budget: int = DEFAULT_CONTEXT_BUDGET) -> str:
    """Head-of-document truncation to the character budget."""
    if len(context) <= budget:
        return context
    return context[:budget] + "\n[... context truncated ...]"


# ---------------------------------------------------------------------------
# Verdict cache
# ---------------------------------------------------------------------------

class VerdictCache:
    """One JSON file per request hash. Writes go through a temp file and an
    atomic rename, so concurrent duplicate insertions cannot corrupt the
    store and the stored verdict never changes."""

    def __init__(self, directory: str | Path):
        self._dir = Path(directory)
        self._dir.mkdir(parents=True, exist_ok=True)

    def _path(self, request_hash: str) -> Path:
        return self._dir / f"{request_hash}.json"

    def get(self, request_hash: str) -> dict | None:
        path = self._path(request_hash)
        if not path.is_file():
            return None
        try:
            return json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError:
            return None  # a torn write loses the entry, never the run

    def put(self, request_hash: str, record: dict) -> None:
        path = self._path(request_hash)
        if path.is_file():
            return  # idempotent: first verdict wins
        tmp = path.with_name(f".{path.name}.{os.getpid()}.tmp")
        tmp.write_text(
            json.dumps(record, sort_keys=True, ensure_ascii=True), encoding="utf-8"
        )
        os.replace(tmp, path)


# ---------------------------------------------------------------------------
# Backends
# ---------------------------------------------------------------------------

class MockBackend:
    """Deterministic backend driven by fixture tables.

    Similarity verdicts are keyed by the unordered item-id pair; meta
    labels by item id. Missing similarity entries fall back to
    ``default_ordinal``; missing meta entries raise unless a
    ``default_meta`` labels dict is supplied. Replies are rendered as the
    JSON a well-behaved remote judge would produce, so the full parsing
    path is exercised.
    """

    def __init__(
        self,
        similarity: Mapping[frozenset[ItemId], int] | None = None,
        meta: Mapping[ItemId, Mapping[str, Any]] | None = None,
        default_ordinal: int = 0,
        default_meta: Mapping[str, Any] | None = None,
    ):
        self.similarity = dict(similarity or {})
        self.meta = dict(meta or {})
        self.default_ordinal = default_ordinal
        self.default_meta = dict(default_meta) if default_meta else None
        self.dispatch_count = 0
        self._lock = threading.Lock()

    def reply(self, req: JudgeRequest, prompt: str) -> str:
        with self._lock:
            self.dispatch_count += 1
        if req.kind == "similarity":
            key = frozenset(item.item_id for item in req.payload)
            ordinal = self.similarity.get(key, self.default_ordinal)
            return json.dumps({"ordinal": ordinal, "rationale": "fixture"})
        item_id = req.payload[0].item_id
        labels = self.meta.get(item_id, self.default_meta)
        if labels is None:
            raise InputError(f"mock backend has no meta labels for {item_id}")
        return json.dumps(dict(labels))


FULLY_POSITIVE_META = {
    "correctness": CORRECT,
    "significance": SIGNIFICANT,
    "evidence": SUFFICIENT,
    "prediction_of_expert_judgments": JOINT_CLASS_LABELS[0],
}


class RemoteBackend:
    """Minimal chat-style HTTP backend with exponential backoff."""

    def __init__(
        self,
        url: str | None = None,
        token: str | None = None,
        model: str | None = None,
        timeout: float = 120.0,
        backoff: float = 1.0,
        session: requests.Session | None = None,
    ):
        self.url = url or os.environ.get(ENV_URL, "")
        self.token = token or os.environ.get(ENV_TOKEN, "")
        self.model = model or os.environ.get(ENV_MODEL, "")
        if not self.url:
            raise InputError(f"remote judge needs an endpoint URL ({ENV_URL})")
        self.timeout = timeout
        self.backoff = backoff
        self.session = session or requests.Session()

    def reply(self, req: JudgeRequest, prompt: str) -> str:
        headers = {"Content-Type": "application/json"}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        body = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0.0,
        }
        response = self.session.post(
            self.url, json=body, headers=headers, timeout=self.timeout
        )
        if response.status_code != 200:
            raise TransportFailure(
                f"judge endpoint returned HTTP {response.status_code}"
            )
        payload = response.json()
        try:
            return payload["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError):
            raise UnparseableResponse(
                "reply is not in chat-completion shape"
            ) from None


# ---------------------------------------------------------------------------
# Reply parsing and validation
# ---------------------------------------------------------------------------

def _extract_json(text: str) -> dict | None:
    text = (text or "").strip()
    try:
        obj = json.loads(text)
        if isinstance(obj, dict):
            return obj
    except json.JSONDecodeError:
        pass
    start, end = text.find("{"), text.rfind("}")
    if start != -1 and end > start:
        try:
            obj = json.loads(text[start : end + 1])
            if isinstance(obj, dict):
                return obj
        except json.JSONDecodeError:
            return None
    return None


# Which joint-class predictions are compatible with each own-axis labeling.
# Disagreement classes are compatible with either side of their axis.
def check_prediction_consistency(
    correctness: str,
    significance: str | None,
    evidence: str | None,
    prediction: str,
) -> None:
    """Enforce that the predicted joint class matches the final axis labels."""
    if prediction not in JOINT_CLASS_LABELS:
        raise UnknownLabelString(f"prediction {prediction!r}")
    if correctness == NOT_CORRECT:
        if prediction not in ("incorrect", "disagree_on_correctness"):
            raise InconsistentPrediction(
                f"Not Correct item cannot predict {prediction!r}"
            )
        return
    if prediction in ("incorrect",):
        raise InconsistentPrediction("Correct item cannot predict 'incorrect'")
    if prediction == "disagree_on_correctness":
        return
    if prediction == "correct_disagree_on_significance":
        return
    if significance is None:
        raise CascadeViolation("Correct items need a significance label")
    by_significance = {
        SIGNIFICANT: (
            "correct_significant_sufficient",
            "correct_significant_requires_more",
            "correct_significant_disagree_on_evidence",
        ),
        MARGINALLY_SIGNIFICANT: (
            "correct_marginal_sufficient",
            "correct_marginal_requires_more",
            "correct_marginal_disagree_on_evidence",
        ),
        NOT_SIGNIFICANT: ("correct_not_significant",),
    }
    allowed = by_significance[significance]
    if prediction not in allowed:
        raise InconsistentPrediction(
            f"prediction {prediction!r} contradicts significance "
            f"{significance!r}"
        )
    if prediction.endswith("_sufficient") and evidence != "Sufficient":
        raise InconsistentPrediction(
            f"prediction {prediction!r} contradicts evidence {evidence!r}"
        )
    if prediction.endswith("_requires_more") and evidence != "Requires More":
        raise InconsistentPrediction(
            f"prediction {prediction!r} contradicts evidence {evidence!r}"
        )


def parse_meta_labels(obj: Mapping[str, Any], where: str = "") -> dict:
    """Validate one meta-review labeling: exact strings, cascade,
    prediction consistency. Returns the normalized labels dict."""
    correctness = obj.get("correctness")
    significance = obj.get("significance")
    evidence = obj.get("evidence")
    prediction = obj.get("prediction_of_expert_judgments")
    if correctness not in CORRECTNESS_LABELS:
        raise UnknownLabelString(f"{where}correctness {correctness!r}")
    if significance is not None and significance not in SIGNIFICANCE_LABELS:
        raise UnknownLabelString(f"{where}significance {significance!r}")
    if evidence is not None and evidence not in EVIDENCE_LABELS:
        raise UnknownLabelString(f"{where}evidence {evidence!r}")
    if correctness == CORRECT:
        if significance is None:
            raise CascadeViolation(f"{where}Correct items need a significance label")
        if significance in (SIGNIFICANT, MARGINALLY_SIGNIFICANT) and evidence is None:
            raise CascadeViolation(f"{where}significant items need an evidence label")
        if significance == NOT_SIGNIFICANT and evidence is not None:
            raise CascadeViolation(
                f"{where}Not Significant items must not carry an evidence label"
            )
    elif significance is not None or evidence is not None:
        raise CascadeViolation(
            f"{where}Not Correct items must not carry downstream labels"
        )
    if prediction is not None:
        check_prediction_consistency(correctness, significance, evidence, prediction)
    return {
        "correctness": correctness,
        "significance": significance,
        "evidence": evidence,
        "prediction_of_expert_judgments": prediction,
        "reasoning": obj.get("reasoning", ""),
    }


def parse_meta_review_document(
    obj: Mapping[str, Any],
) -> dict[ItemId, dict]:
    """Validate a whole meta-review file: top-level paper_id and
    reviewers[], each with items[] carrying item_number, reasoning, the
    three axis labels, and prediction_of_expert_judgments."""
    if "paper_id" not in obj or "reviewers" not in obj:
        raise InputError("meta-review document needs paper_id and reviewers")
    paper_id = str(obj["paper_id"])
    out: dict[ItemId, dict] = {}
    for reviewer in obj["reviewers"]:
        reviewer_id = str(reviewer.get("reviewer_id", ""))
        if not reviewer_id:
            raise InputError(f"{paper_id}: reviewer entry without reviewer_id")
        for entry in reviewer.get("items", []):
            number = entry.get("item_number")
            if not isinstance(number, int) or number < 1:
                raise InputError(
                    f"{paper_id}/{reviewer_id}: item_number must be an "
                    "integer >= 1"
                )
            item_id = ItemId(paper_id, reviewer_id, number)
            if item_id in out:
                raise InputError(f"duplicate meta labels for {item_id}")
            where = f"{paper_id}/{reviewer_id}#{number}: "
            out[item_id] = parse_meta_labels(entry, where)
    return out


# ---------------------------------------------------------------------------
# The judge
# ---------------------------------------------------------------------------

class Judge:
    """Orchestrates template rendering, caching, dispatch, and parsing."""

    def __init__(
        self,
        backend,
        templates: TemplateSet | None = None,
        cache: VerdictCache | None = None,
        retries: int = DEFAULT_RETRIES,
        backoff: float = 0.5,
        context_budget: int = DEFAULT_CONTEXT_BUDGET,
        max_prompt_chars: int = MAX_PROMPT_CHARS,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.backend = backend
        self.templates = templates or TemplateSet()
        self.cache = cache
        self.retries = retries
        self.backoff = backoff
        self.context_budget = context_budget
        self.max_prompt_chars = max_prompt_chars
        self._sleep = sleep

    # -- request construction ------------------------------------------

    def similarity_request(
        self, a: ReviewItem, b: ReviewItem, paper_context: str = ""
    ) -> JudgeRequest:
        return JudgeRequest(
            kind="similarity",
            payload=(a, b),
            paper_context=truncate_context(paper_context, self.context_budget),
            template_id=self.templates.versioned_id("similarity"),
        )

    def meta_review_request(
        self, item: ReviewItem, paper_context: str = ""
    ) -> JudgeRequest:
        return JudgeRequest(
            kind="meta_review",
            payload=(item,),
            paper_context=truncate_context(paper_context, self.context_budget),
            template_id=self.templates.versioned_id("meta_review"),
        )

    # -- dispatch ---------------------------------------------------------

    def _render_prompt(self, req: JudgeRequest) -> str:
        name = req.template_id.split("@", 1)[0]
        template = self.templates.text(name)
        if req.kind == "similarity":
            ordered = sorted(req.payload, key=lambda i: i.item_id)
            prompt = template.format(
                paper_context=req.paper_context,
                item_a=_render_item(ordered[0]),
                item_b=_render_item(ordered[1]),
            )
        else:
            prompt = template.format(
                paper_context=req.paper_context,
                item=_render_item(req.payload[0]),
            )
        if len(prompt) > self.max_prompt_chars:
            raise ContextOverflow(
                f"rendered prompt is {len(prompt)} chars, limit "
                f"{self.max_prompt_chars}"
            )
        return prompt

    def _dispatch(self, req: JudgeRequest, prompt: str) -> tuple[str, float]:
        last: Exception | None = None
        for attempt in range(self.retries):
            start = time.monotonic()
            try:
                return self.backend.reply(req, prompt), time.monotonic() - start
            except (TransportFailure, requests.RequestException) as exc:
                last = exc
                if attempt + 1 < self.retries:
                    self._sleep(self.backoff * (2**attempt))
        raise TransportFailure(
            f"judge dispatch failed after {self.retries} attempts: {last}"
        )

    def _run(self, req: JudgeRequest, parse: Callable[[str, float], JudgeVerdict]) -> JudgeVerdict:
        key = req.request_hash
        if self.cache is not None:
            cached = self.cache.get(key)
            if cached is not None:
                return parse(cached["raw_response"], 0.0)
        prompt = self._render_prompt(req)
        raw, latency = self._dispatch(req, prompt)
        verdict = parse(raw, latency)  # validate before caching
        if self.cache is not None:
            self.cache.put(
                key,
                {
                    "request": {
                        "kind": req.kind,
                        "template_id": req.template_id,
                        "payload": req.canonical_payload(),
                    },
                    "raw_response": raw,
                    "timestamp": time.time(),
                },
            )
        return verdict

    # -- public operations ----------------------------------------------

    def classify_similarity(self, req: JudgeRequest) -> JudgeVerdict:
        if req.kind != "similarity":
            raise InputError("classify_similarity needs a similarity request")

        def parse(raw: str, latency: float) -> JudgeVerdict:
            obj = _extract_json(raw)
            if obj is None or "ordinal" not in obj:
                raise UnparseableResponse(
                    f"no ordinal in similarity reply: {raw[:200]!r}"
                )
            ordinal = obj["ordinal"]
            if not isinstance(ordinal, int) or not 0 <= ordinal <= 3:
                raise UnparseableResponse(f"ordinal out of range: {ordinal!r}")
            return JudgeVerdict(
                kind="similarity", raw_response=raw, latency=latency,
                ordinal=ordinal,
            )

        return self._run(req, parse)

    def judge_meta_review(self, req: JudgeRequest) -> JudgeVerdict:
        if req.kind != "meta_review":
            raise InputError("judge_meta_review needs a meta_review request")

        def parse(raw: str, latency: float) -> JudgeVerdict:
            obj = _extract_json(raw)
            if obj is None:
                raise UnparseableResponse(
                    f"no JSON object in meta-review reply: {raw[:200]!r}"
                )
            labels = parse_meta_labels(obj)
            return JudgeVerdict(
                kind="meta_review", raw_response=raw, latency=latency,
                correctness=labels["correctness"],
                significance=labels["significance"],
                evidence=labels["evidence"],
                prediction=labels["prediction_of_expert_judgments"],
            )

        return self._run(req, parse)
