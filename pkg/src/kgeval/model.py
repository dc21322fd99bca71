"""In-memory knowledge-graph model: entities, typed binary dependencies, verdicts.

Entity labels are normalized (Unicode case-fold, internal whitespace collapsed,
trimmed) so that graphs produced by different tools compare by meaning rather
than by byte equality. All types here are immutable after construction and safe
to share between threads.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence

from .errors import (
    DanglingReference,
    DuplicateDependency,
    DuplicateEntity,
    EmptyLabel,
    VerdictKeyMismatch,
)

_WS = re.compile(r"\s+")
_MODIFIER_RE = re.compile(r"^[a-z_][a-z0-9_]*$")


def normalize_label(text: str) -> str:
    """Case-fold, collapse internal whitespace, and trim an entity label.

    Idempotent; raises EmptyLabel when nothing remains.
    """
    label = _WS.sub(" ", str(text).casefold()).strip()
    if not label:
        raise EmptyLabel(f"label {text!r} is empty after normalization")
    return label


class PredicateKind(enum.Enum):
    """The closed set of six dependency predicates."""

    DEFINES = "Defines"
    ENTAILS = "Entails"
    CAUSES = "Causes"
    CONTAINS = "Contains"
    REQUIRES = "Requires"
    TEMPORAL_ORDER = "TemporalOrder"

    def __str__(self) -> str:
        return self.value


_PREDICATE_BY_FOLD = {kind.value.casefold(): kind for kind in PredicateKind}


def predicate_from_name(name: str) -> Optional[PredicateKind]:
    """Case-insensitive lookup of a predicate kind; None when unknown."""
    return _PREDICATE_BY_FOLD.get(name.strip().casefold())


def normalize_modifier(name: str) -> str:
    mod = str(name).casefold().strip()
    if not _MODIFIER_RE.match(mod):
        raise EmptyLabel(f"invalid modifier name {name!r}")
    return mod


@dataclass(frozen=True)
class Term:
    """An entity label, optionally wrapped in a single dynamic modifier.

    Nesting deeper than one modifier is not representable: the entity slot
    only holds a plain label.
    """

    entity: str
    modifier: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "entity", normalize_label(self.entity))
        if self.modifier is not None:
            object.__setattr__(self, "modifier", normalize_modifier(self.modifier))

    def __str__(self) -> str:
        if self.modifier is None:
            return self.entity
        return f"{self.modifier}({self.entity})"


@dataclass(frozen=True)
class Dependency:
    """One predicate applied to exactly two terms."""

    kind: PredicateKind
    left: Term
    right: Term

    def entities(self) -> tuple[str, str]:
        return (self.left.entity, self.right.entity)

    def __str__(self) -> str:
        return f"{self.kind}({self.left}, {self.right})"


class KnowledgeGraph:
    """Entities plus typed binary dependencies.

    Declaration order of entities and dependencies is preserved (it drives
    prompt rendering), while equality and hashing use set semantics.
    """

    __slots__ = ("entities", "dependencies", "warnings", "key_knowledge")

    def __init__(
        self,
        entities: Sequence[str],
        dependencies: Sequence[Dependency],
        warnings: Sequence[str] = (),
        key_knowledge: object = None,
    ):
        self.entities: tuple[str, ...] = tuple(entities)
        self.dependencies: tuple[Dependency, ...] = tuple(dependencies)
        self.warnings: tuple[str, ...] = tuple(warnings)
        # Opaque provenance block retained from source documents; never scored.
        self.key_knowledge = key_knowledge

    @property
    def entity_set(self) -> frozenset[str]:
        return frozenset(self.entities)

    @property
    def dependency_set(self) -> frozenset[Dependency]:
        return frozenset(self.dependencies)

    def __len__(self) -> int:
        return len(self.entities) + len(self.dependencies)

    def __eq__(self, other) -> bool:
        if not isinstance(other, KnowledgeGraph):
            return NotImplemented
        return (
            self.entity_set == other.entity_set
            and self.dependency_set == other.dependency_set
        )

    def __hash__(self) -> int:
        return hash((self.entity_set, self.dependency_set))

    def __repr__(self) -> str:
        return (
            f"KnowledgeGraph(entities={len(self.entities)}, "
            f"dependencies={len(self.dependencies)})"
        )


def validate_graph(
    entities: Iterable[str],
    dependencies: Iterable[Dependency],
    lenient: bool = False,
) -> KnowledgeGraph:
    """Build a KnowledgeGraph, enforcing closure over referenced entities.

    Strict mode rejects dependencies that reference undeclared entities.
    Lenient mode auto-declares them and records a warning per rescue; use it
    for crawled or model-produced graphs, never for benchmark references.
    """
    normalized: list[str] = []
    seen: set[str] = set()
    for raw in entities:
        label = normalize_label(raw)
        if label in seen:
            raise DuplicateEntity(f"entity {label!r} declared more than once")
        seen.add(label)
        normalized.append(label)

    deps: list[Dependency] = []
    dep_seen: set[Dependency] = set()
    warnings: list[str] = []
    for dep in dependencies:
        if dep in dep_seen:
            raise DuplicateDependency(f"dependency {dep} declared more than once")
        dep_seen.add(dep)
        for label in dep.entities():
            if label not in seen:
                if not lenient:
                    raise DanglingReference(dep, label)
                seen.add(label)
                normalized.append(label)
                warnings.append(
                    f"auto-declared entity {label!r} referenced by {dep}"
                )
        deps.append(dep)

    return KnowledgeGraph(normalized, deps, warnings)


class DependencyVerdict(NamedTuple):
    verdict: bool
    reason: str = ""


@dataclass(frozen=True)
class GroundingVerdicts:
    """Per-entity and per-dependency boolean judgments from a grounding pass."""

    entity_verdicts: Mapping[str, bool] = field(default_factory=dict)
    dependency_verdicts: Mapping[Dependency, DependencyVerdict] = field(
        default_factory=dict
    )

    def __post_init__(self):
        object.__setattr__(self, "entity_verdicts", dict(self.entity_verdicts))
        object.__setattr__(
            self,
            "dependency_verdicts",
            {
                dep: v if isinstance(v, DependencyVerdict) else DependencyVerdict(*v)
                for dep, v in dict(self.dependency_verdicts).items()
            },
        )


MISSING_REASON = "missing from response"


def complete_verdicts(ref: KnowledgeGraph, verdicts: GroundingVerdicts) -> GroundingVerdicts:
    """Fill verdicts so their key sets cover the reference graph exactly.

    Items absent from the verdicts default to false; items unknown to the
    reference raise VerdictKeyMismatch.
    """
    extra_entities = set(verdicts.entity_verdicts) - ref.entity_set
    extra_deps = set(verdicts.dependency_verdicts) - ref.dependency_set
    if extra_entities or extra_deps:
        extras = sorted(extra_entities) + sorted(str(d) for d in extra_deps)
        raise VerdictKeyMismatch(f"verdicts reference unknown items: {extras}")

    entity_verdicts = {
        label: verdicts.entity_verdicts.get(label, False) for label in ref.entities
    }
    dependency_verdicts = {
        dep: verdicts.dependency_verdicts.get(dep, DependencyVerdict(False, MISSING_REASON))
        for dep in ref.dependencies
    }
    return GroundingVerdicts(entity_verdicts, dependency_verdicts)
