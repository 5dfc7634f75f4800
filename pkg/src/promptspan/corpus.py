"""Data model and I/O for template-extraction corpora.

A corpus is a set of documents, each anchored by a trigger span and carrying
a pool of candidate spans; every slot of the document's template type is
annotated with the subset of candidates that fills it (possibly empty).
Token indices are 1-based and inclusive on both ends, in files and in memory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

from .errors import CorpusError


@dataclass(frozen=True, order=True)
class Span:
    """Token span, 1-based inclusive endpoints."""

    start: int
    end: int

    def __post_init__(self):
        if self.start < 1 or self.end < self.start:
            raise CorpusError(f"inverted or non-positive span ({self.start},{self.end})")

    def within(self, length: int) -> bool:
        return self.end <= length

    def to_list(self) -> list[int]:
        return [self.start, self.end]


@dataclass
class SlotInstance:
    slot_type: str
    gold: set[Span] = field(default_factory=set)


@dataclass
class TemplateInstance:
    doc_id: str
    template_type: str
    context: list[str]
    trigger: Span
    candidates: set[Span]
    slots: list[SlotInstance]

    def to_dict(self) -> dict[str, Any]:
        return {
            "doc_id": self.doc_id,
            "template_type": self.template_type,
            "tokens": list(self.context),
            "trigger": self.trigger.to_list(),
            "candidates": [s.to_list() for s in sorted(self.candidates)],
            "slots": [
                {"slot_type": sl.slot_type, "gold": [s.to_list() for s in sorted(sl.gold)]}
                for sl in self.slots
            ],
        }


@dataclass
class SlotDef:
    name: str
    description: str | None = None
    spans: bool = True  # slots whose fillers are not spans are dropped at ingestion


@dataclass
class TemplateDef:
    name: str
    description: str | None = None
    slots: list[SlotDef] = field(default_factory=list)


@dataclass
class Ontology:
    templates: list[TemplateDef]

    def __post_init__(self):
        names = [t.name for t in self.templates]
        if len(set(names)) != len(names):
            raise CorpusError("duplicate template name in ontology")
        for t in self.templates:
            slot_names = [s.name for s in t.slots]
            if len(set(slot_names)) != len(slot_names):
                raise CorpusError(f"duplicate slot name in template {t.name!r}")

    def template(self, name: str) -> TemplateDef:
        for t in self.templates:
            if t.name == name:
                return t
        raise CorpusError(f"unknown template type {name!r}")

    def slot(self, template_type: str, slot_type: str) -> SlotDef:
        for s in self.template(template_type).slots:
            if s.name == slot_type:
                return s
        raise CorpusError(f"unknown slot type {slot_type!r} in template {template_type!r}")

    def slot_keys(self) -> list[tuple[str, str]]:
        """All (template_type, slot_type) pairs, ontology order."""
        return [(t.name, s.name) for t in self.templates for s in t.slots]

    def to_dict(self) -> dict[str, Any]:
        return {
            "templates": [
                {
                    "name": t.name,
                    "description": t.description,
                    "slots": [
                        {"name": s.name, "description": s.description, "spans": s.spans}
                        for s in t.slots
                    ],
                }
                for t in self.templates
            ]
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> Ontology:
        templates = []
        for t in d.get("templates", []):
            slots = [
                SlotDef(
                    name=s["name"],
                    description=s.get("description"),
                    spans=bool(s.get("spans", True)),
                )
                for s in t.get("slots", [])
            ]
            templates.append(TemplateDef(name=t["name"], description=t.get("description"), slots=slots))
        return cls(templates=templates)


@dataclass
class DatasetSplit:
    name: str
    instances: list[TemplateInstance]


def load_ontology(path: str | Path) -> Ontology:
    with open(path, encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"malformed ontology file {path}: {exc}") from exc
    return Ontology.from_dict(payload)


def save_ontology(ontology: Ontology, path: str | Path) -> None:
    Path(path).write_text(json.dumps(ontology.to_dict(), indent=2) + "\n", encoding="utf-8")


def validate_instance(instance: TemplateInstance, ontology: Ontology | None = None) -> list[str]:
    """Return every violated invariant (empty list means the instance is valid)."""
    violations = []
    n = len(instance.context)
    if n == 0:
        violations.append("empty context")
    if not instance.trigger.within(n):
        violations.append(f"trigger span out of bounds {instance.trigger.to_list()} (context length {n})")
    seen: set[Span] = set()
    for cand in instance.candidates:
        if not cand.within(n):
            violations.append(f"candidate span out of bounds {cand.to_list()} (context length {n})")
        if cand in seen:
            violations.append(f"duplicate candidate span {cand.to_list()}")
        seen.add(cand)
    slot_types = [sl.slot_type for sl in instance.slots]
    if len(set(slot_types)) != len(slot_types):
        violations.append("duplicate slot type within instance")
    for sl in instance.slots:
        for g in sl.gold:
            if not g.within(n):
                violations.append(
                    f"gold span out of bounds {g.to_list()} for slot {sl.slot_type!r} (context length {n})"
                )
            elif g not in instance.candidates:
                violations.append(f"gold span {g.to_list()} not in candidate set (slot {sl.slot_type!r})")
    if ontology is not None:
        try:
            tdef = ontology.template(instance.template_type)
        except CorpusError:
            violations.append(f"unknown template type {instance.template_type!r}")
        else:
            known = {s.name for s in tdef.slots}
            for sl in instance.slots:
                if sl.slot_type not in known:
                    violations.append(
                        f"unknown slot type {sl.slot_type!r} for template {instance.template_type!r}"
                    )
    return violations


def _parse_span(raw: Any, what: str) -> Span:
    if not (isinstance(raw, (list, tuple)) and len(raw) == 2):
        raise CorpusError(f"{what} must be a [start, end] pair, got {raw!r}")
    start, end = raw
    if not (isinstance(start, int) and isinstance(end, int)):
        raise CorpusError(f"{what} endpoints must be integers, got {raw!r}")
    if start < 1 or end < start:
        raise CorpusError(f"{what} is inverted or non-positive: {raw!r}")
    return Span(start, end)


def parse_instance(payload: dict[str, Any]) -> TemplateInstance:
    try:
        tokens = list(payload["tokens"])
        trigger = _parse_span(payload["trigger"], "trigger")
        candidates = {_parse_span(c, "candidate") for c in payload["candidates"]}
        slots = []
        for sl in payload.get("slots", []):
            gold = {_parse_span(g, "gold span") for g in sl.get("gold", [])}
            slots.append(SlotInstance(slot_type=sl["slot_type"], gold=gold))
        return TemplateInstance(
            doc_id=str(payload["doc_id"]),
            template_type=str(payload["template_type"]),
            context=tokens,
            trigger=trigger,
            candidates=candidates,
            slots=slots,
        )
    except KeyError as exc:
        raise CorpusError(f"missing field {exc.args[0]!r}") from exc


def load_corpus(path: str | Path, ontology: Ontology, name: str = "train") -> DatasetSplit:
    """Load a JSON Lines corpus file, validating every instance.

    Slot instances whose ontology slot is declared as not span-filled are
    dropped. Any invariant violation aborts with the offending line number.
    """
    instances = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                payload = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: malformed JSON: {exc}") from exc
            try:
                inst = parse_instance(payload)
            except CorpusError as exc:
                raise CorpusError(f"{path}:{lineno}: {exc}") from exc
            inst.slots = [sl for sl in inst.slots if _keeps_spans(ontology, inst.template_type, sl.slot_type)]
            violations = validate_instance(inst, ontology)
            if violations:
                raise CorpusError(f"{path}:{lineno}: " + "; ".join(violations))
            instances.append(inst)
    return DatasetSplit(name=name, instances=instances)


def _keeps_spans(ontology: Ontology, template_type: str, slot_type: str) -> bool:
    """True unless the ontology explicitly declares the slot as not span-filled.

    Unknown templates/slots pass through so validation can report them.
    """
    try:
        return ontology.slot(template_type, slot_type).spans
    except CorpusError:
        return True


def save_corpus(split: DatasetSplit, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for inst in split.instances:
            fh.write(json.dumps(inst.to_dict()) + "\n")


def compute_corpus_stats(split: DatasetSplit) -> dict[str, int]:
    """Counts of distinct types and instances, as reported in dataset tables."""
    template_types = {inst.template_type for inst in split.instances}
    slot_types = {sl.slot_type for inst in split.instances for sl in inst.slots}
    n_slots = sum(len(inst.slots) for inst in split.instances)
    return {
        "template_types": len(template_types),
        "slot_types": len(slot_types),
        "template_instances": len(split.instances),
        "slot_instances": n_slots,
    }


def splits_equal(a: DatasetSplit, b: DatasetSplit) -> bool:
    if len(a.instances) != len(b.instances):
        return False
    return all(x.to_dict() == y.to_dict() for x, y in zip(a.instances, b.instances))


def iter_slot_examples(split: DatasetSplit) -> Iterable[tuple[TemplateInstance, SlotInstance]]:
    """Yield every (instance, slot) pair in corpus order."""
    for inst in split.instances:
        for sl in inst.slots:
            yield inst, sl
