"""Parsing and serialization for the dependency DSL, KG JSON files, manifests.

Grammar of a dependency string::

    dep  := KIND '(' term ',' term ')'
    term := LABEL | IDENT '(' LABEL ')'

LABEL may contain spaces (and most other characters) but never commas or
parentheses; IDENT is a lowercase identifier naming a dynamic modifier. The
serializer emits the canonical form "Kind(left, right)" with exactly one
space after the comma, and parse(serialize(d)) == d for every valid
Dependency.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from .errors import (
    ArityError,
    EmptyLabel,
    InvalidDiscipline,
    InvalidLevel,
    MalformedJson,
    MalformedLine,
    ManifestError,
    NestingTooDeep,
    UnbalancedParens,
    UnknownPredicate,
)
from .model import Dependency, KnowledgeGraph, Term, predicate_from_name, validate_graph

EDUCATION_LEVELS = ("preschool", "primary", "secondary", "high", "undergraduate", "phd")

DISCIPLINES = (
    "biology",
    "chemistry",
    "economics",
    "engineering",
    "geography",
    "history",
    "literature",
    "math",
    "philosophy",
    "sociology",
)

_IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _split_top_level(body: str) -> list[str]:
    """Split on commas at parenthesis depth zero; reject unbalanced input."""
    parts: list[str] = []
    depth = 0
    start = 0
    for i, ch in enumerate(body):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise UnbalancedParens(f"unexpected ')' in {body!r}")
        elif ch == "," and depth == 0:
            parts.append(body[start:i])
            start = i + 1
    if depth != 0:
        raise UnbalancedParens(f"unclosed '(' in {body!r}")
    parts.append(body[start:])
    return parts


def _parse_term(text: str) -> Term:
    arg = text.strip()
    open_idx = arg.find("(")
    if open_idx < 0:
        if ")" in arg:
            raise UnbalancedParens(f"unexpected ')' in term {text!r}")
        return Term(arg)
    name = arg[:open_idx].strip()
    if not arg.endswith(")"):
        raise UnbalancedParens(f"modifier term {text!r} is not closed")
    if not _IDENT_RE.match(name):
        raise UnbalancedParens(f"label may not contain parentheses: {text!r}")
    inner = arg[open_idx + 1 : -1]
    if "(" in inner or ")" in inner:
        if "(" in inner and ")" in inner and inner.index("(") < inner.rindex(")"):
            raise NestingTooDeep(f"modifiers cannot nest: {text!r}")
        raise UnbalancedParens(f"unbalanced parentheses in term {text!r}")
    if "," in inner:
        raise ArityError(f"a modifier takes exactly one label: {text!r}")
    return Term(inner, name)


def parse_dependency(text: str) -> Dependency:
    """Parse "Kind(term, term)" into a Dependency with normalized labels.

    Whitespace around tokens is tolerated; predicate names match
    case-insensitively against the six known kinds.
    """
    s = str(text).strip()
    open_idx = s.find("(")
    if open_idx < 0:
        raise UnbalancedParens(f"no '(' in dependency {text!r}")
    head = s[:open_idx].strip()
    kind = predicate_from_name(head)
    if kind is None:
        raise UnknownPredicate(f"unknown predicate {head!r} in {text!r}")
    if not s.endswith(")"):
        raise UnbalancedParens(f"dependency {text!r} does not end with ')'")
    args = _split_top_level(s[open_idx + 1 : -1])
    if len(args) != 2:
        raise ArityError(f"expected 2 arguments, got {len(args)} in {text!r}")
    return Dependency(kind, _parse_term(args[0]), _parse_term(args[1]))


def serialize_dependency(dep: Dependency) -> str:
    """Render the canonical form "Kind(left, right)"."""
    return f"{dep.kind}({dep.left}, {dep.right})"


# --- KG JSON (elements/dependencies document) -------------------------------

_VISUAL_KEY = "Visual Components"
_KNOWLEDGE_KEY = "Key Knowledge"


def _graph_from_document(doc: object, lenient: bool) -> KnowledgeGraph:
    if not isinstance(doc, dict):
        raise MalformedJson("top-level value must be a JSON object")
    visual = doc.get(_VISUAL_KEY)
    if not isinstance(visual, dict):
        raise MalformedJson(f"missing or invalid {_VISUAL_KEY!r} object")
    elements = visual.get("elements")
    dep_strings = visual.get("dependencies", [])
    if not isinstance(elements, list) or not all(isinstance(e, str) for e in elements):
        raise MalformedJson("'elements' must be an array of strings")
    if not isinstance(dep_strings, list) or not all(
        isinstance(d, str) for d in dep_strings
    ):
        raise MalformedJson("'dependencies' must be an array of strings")

    deps = []
    for i, raw in enumerate(dep_strings):
        try:
            deps.append(parse_dependency(raw))
        except (UnknownPredicate, ArityError, NestingTooDeep, UnbalancedParens, EmptyLabel) as exc:
            raise type(exc)(f"dependencies[{i}]: {exc}") from exc

    graph = validate_graph(elements, deps, lenient=lenient)
    graph.key_knowledge = doc.get(_KNOWLEDGE_KEY)
    return graph


def parse_kg_json(data: Union[bytes, str], lenient: bool = False) -> KnowledgeGraph:
    """Parse a KG JSON document; strict closure validation by default.

    An optional "Key Knowledge" block is retained verbatim on the graph for
    provenance and plays no role in scoring or equality.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise MalformedJson(f"invalid JSON: {exc}") from exc
    return _graph_from_document(doc, lenient)


def serialize_kg_json(graph: KnowledgeGraph) -> str:
    doc: dict = {
        _VISUAL_KEY: {
            "elements": list(graph.entities),
            "dependencies": [serialize_dependency(d) for d in graph.dependencies],
        }
    }
    if graph.key_knowledge is not None:
        doc[_KNOWLEDGE_KEY] = graph.key_knowledge
    return json.dumps(doc, indent=2, ensure_ascii=False)


# --- benchmark manifests (NDJSON) -------------------------------------------


@dataclass(frozen=True)
class ManifestItem:
    id: str
    prompt: str
    education_level: str
    discipline: str
    kg: KnowledgeGraph
    generated_image_path: str
    reference_image_path: Optional[str] = None
    model: Optional[str] = None


def _item_from_line(line_no: int, obj: dict, lenient_kg: bool) -> ManifestItem:
    for key in ("id", "prompt", "education_level", "discipline", "kg", "generated_image_path"):
        if key not in obj:
            raise MalformedLine(line_no, f"missing required field {key!r}")
    level = str(obj["education_level"]).strip().lower()
    if level not in EDUCATION_LEVELS:
        raise InvalidLevel(line_no, f"unknown education_level {obj['education_level']!r}")
    discipline = str(obj["discipline"]).strip().lower()
    if discipline not in DISCIPLINES:
        raise InvalidDiscipline(line_no, f"unknown discipline {obj['discipline']!r}")
    try:
        graph = _graph_from_document(obj["kg"], lenient=lenient_kg)
    except Exception as exc:
        raise MalformedLine(line_no, f"invalid kg: {exc}") from exc
    return ManifestItem(
        id=str(obj["id"]),
        prompt=str(obj["prompt"]),
        education_level=level,
        discipline=discipline,
        kg=graph,
        generated_image_path=str(obj["generated_image_path"]),
        reference_image_path=(
            str(obj["reference_image_path"]) if obj.get("reference_image_path") else None
        ),
        model=str(obj["model"]) if obj.get("model") else None,
    )


def parse_manifest_item(obj: dict, lenient_kg: bool = False) -> ManifestItem:
    """Parse a single already-decoded manifest entry."""
    return _item_from_line(1, obj, lenient_kg)


def parse_manifest(
    data: Union[bytes, str],
    partial: bool = False,
    lenient_kg: bool = False,
):
    """Parse a newline-delimited JSON manifest.

    Returns a list of ManifestItem, raising on the first bad line. With
    partial=True, returns (items, errors) instead, where each error is a
    positioned ManifestError and every well-formed line still yields an item.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    items: list[ManifestItem] = []
    errors: list[ManifestError] = []
    for line_no, line in enumerate(data.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedLine(line_no, f"invalid JSON: {exc.msg}") from exc
            if not isinstance(obj, dict):
                raise MalformedLine(line_no, "line is not a JSON object")
            items.append(_item_from_line(line_no, obj, lenient_kg))
        except ManifestError as exc:
            if not partial:
                raise
            errors.append(exc)
    if partial:
        return items, errors
    return items


def read_manifest(path: Union[str, Path], **kwargs):
    return parse_manifest(Path(path).read_bytes(), **kwargs)
