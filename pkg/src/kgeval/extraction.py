"""Ground a reference graph in a generated image via a chat-completion LLM.

The backend contract is a single ``send(text, image) -> reply text`` call so
that hosted reasoning models, lighter variants, or local servers plug in
without code changes. Determinism comes from transcript caching, not from
sampling controls (reasoning endpoints tend to ignore those anyway).
"""

from __future__ import annotations

import base64
import hashlib
import json
import logging
import re
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Protocol, Union

import requests

from . import prompts
from .dsl import parse_dependency, serialize_dependency
from .errors import (
    BackendUnavailable,
    EmptyReference,
    ExhaustedRetries,
    NoStructuredBlock,
    RateLimited,
)
from .model import (
    DependencyVerdict,
    GroundingVerdicts,
    KnowledgeGraph,
    complete_verdicts,
    normalize_label,
)

log = logging.getLogger(__name__)

API_KEY_ENV = "KGEVAL_API_KEY"
API_BASE_ENV = "KGEVAL_API_BASE"


@dataclass(frozen=True)
class ImageAttachment:
    data: bytes
    media_type: str = "image/png"

    def as_data_uri(self) -> str:
        return f"data:{self.media_type};base64,{base64.b64encode(self.data).decode('ascii')}"


class ChatBackend(Protocol):
    model_id: str

    def send(self, text: str, image: Optional[ImageAttachment]) -> str:
        """Send one user turn (optionally with an image) and return the reply text."""
        ...


@dataclass
class HttpChatBackend:
    """Vendor-neutral chat-completion client over an OpenAI-style HTTP API."""

    endpoint: str
    model_id: str
    api_key: str = field(repr=False, default="")
    reasoning_effort: Optional[str] = None
    timeout: float = 300.0

    @classmethod
    def from_env(cls, model_id: str, **kwargs) -> "HttpChatBackend":
        import os

        endpoint = os.environ.get(API_BASE_ENV, "")
        if not endpoint:
            raise BackendUnavailable(f"{API_BASE_ENV} is not set")
        return cls(
            endpoint=endpoint,
            model_id=model_id,
            api_key=os.environ.get(API_KEY_ENV, ""),
            **kwargs,
        )

    def _post(self, payload: dict) -> requests.Response:
        url = self.endpoint.rstrip("/") + "/chat/completions"
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        return requests.post(url, json=payload, headers=headers, timeout=self.timeout)

    def send(self, text: str, image: Optional[ImageAttachment]) -> str:
        content: list[dict] = [{"type": "text", "text": text}]
        if image is not None:
            content.append(
                {"type": "image_url", "image_url": {"url": image.as_data_uri()}}
            )
        payload: dict = {
            "model": self.model_id,
            "messages": [{"role": "user", "content": content}],
        }
        if self.reasoning_effort:
            payload["reasoning_effort"] = self.reasoning_effort
        try:
            resp = self._post(payload)
        except requests.RequestException as exc:
            raise BackendUnavailable(f"backend request failed: {exc}") from exc
        if resp.status_code == 429:
            retry_after = resp.headers.get("Retry-After")
            raise RateLimited(
                "backend rate-limited the request",
                retry_after=float(retry_after) if retry_after else None,
            )
        if resp.status_code >= 500:
            raise BackendUnavailable(f"backend returned {resp.status_code}")
        if resp.status_code != 200:
            raise BackendUnavailable(
                f"backend returned {resp.status_code}: {resp.text[:200]}"
            )
        try:
            return resp.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise BackendUnavailable(f"malformed backend response: {exc}") from exc


# --- prompt rendering ---------------------------------------------------------


@dataclass(frozen=True)
class EvalPromptBundle:
    text: str
    elem_depend_block: str
    image: Optional[ImageAttachment] = None

    def with_image(self, image: ImageAttachment) -> "EvalPromptBundle":
        return EvalPromptBundle(self.text, self.elem_depend_block, image)


def render_elem_depend(ref: KnowledgeGraph) -> str:
    lines = ["", "Elements:"]
    lines += [f"- {label}" for label in ref.entities]
    lines += ["", "Dependencies:"]
    lines += [f"- {serialize_dependency(d)}" for d in ref.dependencies]
    return "\n".join(lines)


def render_eval_prompt(ref: KnowledgeGraph) -> EvalPromptBundle:
    """Fill the grounding template with the reference entity/dependency lists.

    Reference order is preserved, and the rendered text differs from the
    template only at the substitution point.
    """
    if len(ref) == 0:
        raise EmptyReference("cannot render a grounding prompt for an empty graph")
    block = render_elem_depend(ref)
    text = prompts.GROUNDING_TEMPLATE.replace(prompts.GROUNDING_PLACEHOLDER, block)
    return EvalPromptBundle(text=text, elem_depend_block=block)


def prompt_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


# --- reply parsing -------------------------------------------------------------

_FENCE_RE = re.compile(r"```[a-zA-Z0-9_-]*\n(.*?)```", re.DOTALL)
_VERDICT_RE = re.compile(r'^[\s"\'\[\(\-\*]*(yes|no)\b[\]\)"\']*\s*(.*)$', re.IGNORECASE)
_LINE_RE = re.compile(r'^\s*[-*]?\s*"?(?P<key>[^:"][^:]*?)"?\s*:\s*(?P<value>.+?)\s*,?\s*$')


def _candidate_texts(reply: str) -> list[str]:
    fenced = [m.group(1) for m in _FENCE_RE.finditer(reply)]
    return fenced + [reply]


def _verdict_from_value(value) -> Optional[tuple[bool, str]]:
    if isinstance(value, bool):
        return value, ""
    if not isinstance(value, str):
        return None
    m = _VERDICT_RE.match(value.strip())
    if not m:
        return None
    reason = m.group(2).strip().strip('",').strip()
    reason = reason.strip("[]").strip("-— ").strip()
    return m.group(1).lower() == "yes", reason


def _walk_json_maps(obj, found: dict):
    """Collect Element_Evaluation / Dependency_Evaluation maps anywhere in the tree."""
    if not isinstance(obj, dict):
        return
    for key, value in obj.items():
        slug = re.sub(r"[^a-z]", "", str(key).lower())
        if slug == "elementevaluation" and isinstance(value, dict):
            found["elements"].update(value)
        elif slug == "dependencyevaluation" and isinstance(value, dict):
            found["dependencies"].update(value)
        elif isinstance(value, dict):
            _walk_json_maps(value, found)


def _try_json_block(text: str) -> Optional[dict]:
    start = text.find("{")
    if start < 0:
        return None
    depth = 0
    for i in range(start, len(text)):
        if text[i] == "{":
            depth += 1
        elif text[i] == "}":
            depth -= 1
            if depth == 0:
                try:
                    return json.loads(text[start : i + 1])
                except json.JSONDecodeError:
                    return None
    return None


def _extract_raw_verdicts(reply: str) -> list[tuple[str, bool, str]]:
    """Pull (key, verdict, reason) triples out of a reply, best effort."""
    for text in _candidate_texts(reply):
        doc = _try_json_block(text)
        if doc is not None:
            found = {"elements": {}, "dependencies": {}}
            _walk_json_maps(doc, found)
            triples = []
            for section in ("elements", "dependencies"):
                for key, value in found[section].items():
                    parsed = _verdict_from_value(value)
                    if parsed is not None:
                        triples.append((str(key), parsed[0], parsed[1]))
            if triples:
                return triples

    triples = []
    for text in _candidate_texts(reply):
        for line in text.splitlines():
            m = _LINE_RE.match(line)
            if not m:
                continue
            parsed = _verdict_from_value(m.group("value"))
            if parsed is None:
                continue
            triples.append((m.group("key").strip(), parsed[0], parsed[1]))
        if triples:
            return triples
    return triples


def _normalize_dep_key(key: str) -> Optional[str]:
    try:
        return serialize_dependency(parse_dependency(key))
    except Exception:
        return None


def parse_eval_response(reply: str, ref: KnowledgeGraph) -> GroundingVerdicts:
    """Match grounding judgments in a model reply to the reference graph.

    Tolerates code fences, surrounding prose, JSON or line-based layouts,
    bracketed and case-varying yes/no. Reference items absent from the reply
    default to false; judgments for unknown items are ignored and logged.
    Raises NoStructuredBlock when nothing in the reply matches the reference.
    """
    triples = _extract_raw_verdicts(reply)

    dep_by_string = {serialize_dependency(d): d for d in ref.dependencies}
    entity_verdicts: dict[str, bool] = {}
    dependency_verdicts: dict = {}
    extras: list[str] = []
    for key, verdict, reason in triples:
        dep_key = _normalize_dep_key(key)
        if dep_key is not None and dep_key in dep_by_string:
            dependency_verdicts[dep_by_string[dep_key]] = DependencyVerdict(verdict, reason)
            continue
        try:
            label = normalize_label(key)
        except Exception:
            extras.append(key)
            continue
        if label in ref.entity_set:
            entity_verdicts[label] = verdict
        else:
            extras.append(key)

    if not entity_verdicts and not dependency_verdicts:
        raise NoStructuredBlock(
            "reply contains no judgments matching the reference graph"
        )
    if extras:
        log.info("ignoring %d judgment(s) for unknown items: %s", len(extras), extras[:5])

    return complete_verdicts(
        ref, GroundingVerdicts(entity_verdicts, dependency_verdicts)
    )


# --- grounding call with retries ------------------------------------------------


@dataclass(frozen=True)
class RetryPolicy:
    max_retries: int = 2
    backoff: float = 0.5
    backoff_factor: float = 2.0


def ground_image(
    image: ImageAttachment,
    ref: KnowledgeGraph,
    backend: ChatBackend,
    retry_policy: RetryPolicy = RetryPolicy(),
    sleep: Callable[[float], None] = time.sleep,
) -> tuple[GroundingVerdicts, dict]:
    """Render the grounding prompt, query the backend, parse the verdicts.

    Unusable replies and transient backend failures are retried up to
    retry_policy.max_retries with exponential backoff (a rate-limit hint
    stretches the wait). Returns the verdicts plus the raw transcript for
    caching and audits.
    """
    bundle = render_eval_prompt(ref).with_image(image)
    attempts = retry_policy.max_retries + 1
    delay = retry_policy.backoff
    last_error: Exception | None = None
    for attempt in range(attempts):
        if attempt:
            sleep(delay)
            delay *= retry_policy.backoff_factor
        try:
            reply = backend.send(bundle.text, bundle.image)
        except RateLimited as exc:
            last_error = exc
            if exc.retry_after is not None:
                delay = max(delay, exc.retry_after)
            continue
        except BackendUnavailable as exc:
            last_error = exc
            continue
        try:
            verdicts = parse_eval_response(reply, ref)
        except NoStructuredBlock as exc:
            last_error = exc
            log.warning("unusable grounding reply (attempt %d): %s", attempt + 1, exc)
            continue
        transcript = {
            "model": getattr(backend, "model_id", "unknown"),
            "prompt_hash": prompt_hash(bundle.text),
            "reply_text": reply,
            "attempts": attempt + 1,
        }
        return verdicts, transcript

    if isinstance(last_error, NoStructuredBlock):
        raise ExhaustedRetries(
            f"no usable reply after {attempts} attempts: {last_error}"
        )
    if isinstance(last_error, RateLimited):
        raise last_error
    raise BackendUnavailable(
        f"backend failed after {attempts} attempts: {last_error}"
    )


# --- transcript cache -----------------------------------------------------------


class TranscriptCache:
    """One JSON file per (item id, backend model, prompt hash) key.

    Reruns hit the cache instead of the backend, which makes batch evaluation
    deterministic and re-entrant; the API key never enters the cache.
    """

    def __init__(self, directory: Union[str, Path]):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, item_id: str, model: str, prompt_digest: str) -> Path:
        raw = json.dumps([item_id, model, prompt_digest])
        key = hashlib.sha256(raw.encode("utf-8")).hexdigest()
        return self.directory / f"{key}.json"

    def get(self, item_id: str, model: str, prompt_digest: str) -> Optional[dict]:
        path = self._path(item_id, model, prompt_digest)
        if not path.exists():
            return None
        try:
            return json.loads(path.read_text("utf-8"))
        except (OSError, json.JSONDecodeError):
            return None

    def put(self, item_id: str, model: str, prompt_digest: str, reply_text: str) -> dict:
        record = {
            "request_hash": prompt_digest,
            "model": model,
            "reply_text": reply_text,
            "timestamp": time.time(),
        }
        path = self._path(item_id, model, prompt_digest)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(record, ensure_ascii=False), "utf-8")
        tmp.replace(path)
        return record
