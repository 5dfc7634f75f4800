"""Deterministic synthetic corpus generator for desk-scale experiments.

The construction makes a correct extractor learnable: every gold filler is a
span whose first token is a marker word unique to its slot, the marker
appears in the context only when the slot has answers, and the slot's name
and description (hence every prompt style) contain that marker word.
Candidate pools mix gold spans of all slots with filler-only distractors, so
separating slots requires actually reading the prompt.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .corpus import DatasetSplit, Ontology, SlotDef, Span, SlotInstance, TemplateDef, TemplateInstance
from .errors import CorpusError

_QUESTION_FORMS = [
    "which {m} was involved in the {t} report ?",
    "what {m} does the {t} mention ?",
    "name the {m} linked to this {t} .",
    "what was the {m} in the {t} story ?",
    "which {m} shows up around the {t} ?",
    "find the {m} connected to the {t} .",
]
_EXPERT_FORM = "which {m} fills this role in the {t} event ?"


@dataclass
class GeneratorConfig:
    """Settings for :func:`generate_synthetic_corpus`.

    multiplicity maps answer count to sampling weight; nil_rate is the
    probability that a slot has no answers at all.
    """

    vocab_size: int = 50
    templates: int = 4
    slots_per_template: int = 3
    context_length: int = 40
    multiplicity: dict[int, float] = field(default_factory=lambda: {1: 0.5, 2: 0.3, 3: 0.2})
    nil_rate: float = 0.2
    distractors: int = 4
    train: int = 120
    dev: int = 40
    test: int = 40

    def __post_init__(self):
        if self.vocab_size < 1 or self.templates < 1 or self.slots_per_template < 1:
            raise CorpusError("vocab_size, templates and slots_per_template must be positive")
        if not self.multiplicity:
            raise CorpusError("multiplicity distribution is empty")
        if any((not isinstance(k, int)) or k < 1 for k in self.multiplicity):
            raise CorpusError("multiplicity counts must be integers >= 1")
        if not 0.0 <= self.nil_rate <= 1.0:
            raise CorpusError(f"nil_rate must be in [0,1], got {self.nil_rate}")
        worst = max(self.multiplicity) * self.slots_per_template + self.distractors
        # spans are at most 2 tokens; the trigger sits in the first third
        min_len = self.context_length // 3 + 1 + 2 * worst
        if self.context_length < min_len:
            raise CorpusError(
                f"context_length {self.context_length} cannot fit trigger plus up to "
                f"{worst} spans (needs >= {min_len})"
            )

    def to_dict(self) -> dict[str, Any]:
        d = self.__dict__.copy()
        d["multiplicity"] = {str(k): v for k, v in self.multiplicity.items()}
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> GeneratorConfig:
        d = dict(d)
        if "multiplicity" in d:
            d["multiplicity"] = {int(k): float(v) for k, v in d["multiplicity"].items()}
        return cls(**d)


def _marker(t: int, s: int) -> str:
    return f"part{t}x{s}"


def make_ontology(config: GeneratorConfig) -> Ontology:
    templates = []
    for t in range(config.templates):
        tname = f"event{t}"
        slots = [
            SlotDef(
                name=_marker(t, s),
                description=f"the {_marker(t, s)} mention tied to the {tname} incident",
            )
            for s in range(config.slots_per_template)
        ]
        templates.append(
            TemplateDef(
                name=tname,
                description=f"a report capturing an {tname} incident and its parts",
                slots=slots,
            )
        )
    return Ontology(templates=templates)


def _sample_multiplicity(rng: np.random.Generator, config: GeneratorConfig) -> int:
    counts = sorted(config.multiplicity)
    weights = np.array([config.multiplicity[c] for c in counts], dtype=float)
    weights /= weights.sum()
    return int(rng.choice(counts, p=weights))


def _generate_instance(
    rng: np.random.Generator, config: GeneratorConfig, ontology: Ontology, doc_id: str, t: int
) -> TemplateInstance:
    n = config.context_length
    tdef = ontology.templates[t]
    fillers = [f"w{i}" for i in range(config.vocab_size)]

    trigger_start = int(rng.integers(1, max(2, n // 3)))
    trigger = Span(trigger_start, trigger_start)

    # decide gold multiplicities, then lay all spans into the post-trigger region
    plan: list[tuple[str | None, int]] = []  # (marker or None for distractor, length)
    gold_counts: dict[str, int] = {}
    for sdef in tdef.slots:
        if rng.random() < config.nil_rate:
            gold_counts[sdef.name] = 0
            continue
        k = _sample_multiplicity(rng, config)
        gold_counts[sdef.name] = k
        for _ in range(k):
            plan.append((sdef.name, int(rng.integers(1, 3))))
    for _ in range(config.distractors):
        plan.append((None, int(rng.integers(1, 3))))
    order = rng.permutation(len(plan))
    plan = [plan[i] for i in order]

    free = n - trigger.end
    needed = sum(length for _, length in plan)
    if needed > free:
        raise CorpusError(
            f"cannot place {needed} span tokens after position {trigger.end} in a "
            f"{n}-token context; increase context_length"
        )

    tokens: list[str | None] = [None] * (n + 1)  # 1-based
    tokens[trigger.start] = tdef.name
    cursor = trigger.end + 1
    slack = free - needed
    spans: list[tuple[str | None, Span]] = []
    for marker, length in plan:
        gap = int(rng.integers(0, slack + 1))
        slack -= gap
        start = cursor + gap
        span = Span(start, start + length - 1)
        spans.append((marker, span))
        tokens[start] = marker if marker is not None else fillers[int(rng.integers(0, len(fillers)))]
        for pos in range(start + 1, span.end + 1):
            tokens[pos] = fillers[int(rng.integers(0, len(fillers)))]
        cursor = span.end + 1
    for pos in range(1, n + 1):
        if tokens[pos] is None:
            tokens[pos] = fillers[int(rng.integers(0, len(fillers)))]

    candidates = {span for _, span in spans}
    slots = [
        SlotInstance(
            slot_type=sdef.name,
            gold={span for marker, span in spans if marker == sdef.name},
        )
        for sdef in tdef.slots
    ]
    return TemplateInstance(
        doc_id=doc_id,
        template_type=tdef.name,
        context=[tok for tok in tokens[1:]],
        trigger=trigger,
        candidates=candidates,
        slots=slots,
    )


def _generate_split(seed_seq: np.random.SeedSequence, config: GeneratorConfig, ontology: Ontology, name: str, size: int) -> DatasetSplit:
    rng = np.random.default_rng(seed_seq)
    instances = [
        _generate_instance(rng, config, ontology, doc_id=f"{name}-{i:04d}", t=i % config.templates)
        for i in range(size)
    ]
    return DatasetSplit(name=name, instances=instances)


def generate_synthetic_corpus(
    config: GeneratorConfig, seed: int
) -> tuple[Ontology, DatasetSplit, DatasetSplit, DatasetSplit]:
    """Generate (ontology, train, dev, test); a pure function of (config, seed)."""
    ontology = make_ontology(config)
    train_seq, dev_seq, test_seq = np.random.SeedSequence(seed).spawn(3)
    return (
        ontology,
        _generate_split(train_seq, config, ontology, "train", config.train),
        _generate_split(dev_seq, config, ontology, "dev", config.dev),
        _generate_split(test_seq, config, ontology, "test", config.test),
    )


def generate_question_bank_records(ontology: Ontology, annotators: int = 3) -> list[dict[str, Any]]:
    """Synthetic question-bank rows for the generated ontology.

    Every question contains the slot's marker word; annotators phrase it
    differently. One additional expert question per slot is flagged.
    """
    records = []
    for t_idx, tdef in enumerate(ontology.templates):
        for s_idx, sdef in enumerate(tdef.slots):
            for a in range(1, annotators + 1):
                form = _QUESTION_FORMS[(a - 1 + t_idx + s_idx) % len(_QUESTION_FORMS)]
                records.append(
                    {
                        "template_type": tdef.name,
                        "slot_type": sdef.name,
                        "annotator": a,
                        "text": form.format(m=sdef.name, t=tdef.name),
                        "expert": False,
                    }
                )
            records.append(
                {
                    "template_type": tdef.name,
                    "slot_type": sdef.name,
                    "annotator": annotators + 1,
                    "text": _EXPERT_FORM.format(m=sdef.name, t=tdef.name),
                    "expert": True,
                }
            )
    return records
