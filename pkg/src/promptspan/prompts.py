"""Prompt styles, question banks, and prompt-quality statistics.

Six prompt styles condition extraction for a (template, slot) pair: a
trainable per-slot special token, the ontology names, the ontology
descriptions, one expert-written question, any of n series of collected
questions, or custom text. Analysis helpers measure how diverse, long, and
tokenizer-friendly collected questions are.
"""

from __future__ import annotations

import hashlib
import json
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable

import numpy as np

from .corpus import Ontology
from .errors import EmbeddingError, PromptError

STYLE_SPECIAL = "special"
STYLE_NAME = "name"
STYLE_DESCRIPTION = "description"
STYLE_EXPERT = "expert"
STYLE_CUSTOM = "custom"

SlotKey = tuple[str, str]  # (template_type, slot_type)


@dataclass
class Question:
    annotator: int
    text: str
    expert: bool = False


@dataclass
class QuestionBank:
    """Collected questions per slot, keyed by (template_type, slot_type)."""

    entries: dict[SlotKey, list[Question]]

    def __post_init__(self):
        for key, questions in self.entries.items():
            if not questions:
                raise PromptError(f"slot {key} has no questions")
            indices = [q.annotator for q in questions]
            if len(set(indices)) != len(indices):
                raise PromptError(f"duplicate annotator index for slot {key}")

    def questions(self, key: SlotKey, include_expert: bool = False) -> list[Question]:
        """Questions for a slot, ordered by annotator index."""
        qs = [q for q in self.entries[key] if include_expert or not q.expert]
        return sorted(qs, key=lambda q: q.annotator)

    @classmethod
    def from_records(cls, records: Iterable[dict[str, Any]]) -> QuestionBank:
        entries: dict[SlotKey, list[Question]] = {}
        for rec in records:
            key = (rec["template_type"], rec["slot_type"])
            entries.setdefault(key, []).append(
                Question(
                    annotator=int(rec["annotator"]),
                    text=str(rec["text"]),
                    expert=bool(rec.get("expert", False)),
                )
            )
        return cls(entries=entries)


def load_question_bank(path: str | Path) -> QuestionBank:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise PromptError(f"{path}:{lineno}: malformed JSON: {exc}") from exc
    return QuestionBank.from_records(records)


def save_question_bank(bank: QuestionBank, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for (template_type, slot_type), questions in bank.entries.items():
            for q in questions:
                fh.write(
                    json.dumps(
                        {
                            "template_type": template_type,
                            "slot_type": slot_type,
                            "annotator": q.annotator,
                            "text": q.text,
                            "expert": q.expert,
                        }
                    )
                    + "\n"
                )


@dataclass
class PromptSet:
    """One prompt per (template, slot); text is empty for the special style."""

    style: str
    prompts: dict[SlotKey, str]

    def get(self, key: SlotKey) -> str:
        if key not in self.prompts:
            raise PromptError(f"no prompt for slot {key} in {self.style!r} prompt set")
        return self.prompts[key]

    def validate_coverage(self, ontology: Ontology) -> None:
        missing = [k for k in ontology.slot_keys() if k not in self.prompts]
        if missing:
            raise PromptError(f"prompt set {self.style!r} misses slots: {missing}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "style": self.style,
            "prompts": [
                {"template_type": t, "slot_type": s, "text": text}
                for (t, s), text in self.prompts.items()
            ],
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> PromptSet:
        return cls(
            style=d["style"],
            prompts={(p["template_type"], p["slot_type"]): p["text"] for p in d["prompts"]},
        )


def load_prompt_set(path: str | Path) -> PromptSet:
    with open(path, encoding="utf-8") as fh:
        return PromptSet.from_dict(json.load(fh))


def save_prompt_set(prompt_set: PromptSet, path: str | Path) -> None:
    Path(path).write_text(json.dumps(prompt_set.to_dict(), indent=2) + "\n", encoding="utf-8")


def build_name_prompt(template_name: str, slot_name: str) -> str:
    if not template_name or not slot_name:
        raise PromptError("template and slot names must be nonempty")
    return f"{template_name} {slot_name}"


def build_description_prompt(ontology: Ontology, template_type: str, slot_type: str) -> str:
    tdef = ontology.template(template_type)
    sdef = ontology.slot(template_type, slot_type)
    if not tdef.description or not sdef.description:
        raise PromptError(f"description unavailable for slot ({template_type!r}, {slot_type!r})")
    return f"{tdef.description} {sdef.description}"


def name_prompt_set(ontology: Ontology) -> PromptSet:
    return PromptSet(
        style=STYLE_NAME,
        prompts={(t, s): build_name_prompt(t, s) for t, s in ontology.slot_keys()},
    )


def description_prompt_set(ontology: Ontology) -> PromptSet:
    return PromptSet(
        style=STYLE_DESCRIPTION,
        prompts={(t, s): build_description_prompt(ontology, t, s) for t, s in ontology.slot_keys()},
    )


def special_prompt_set(ontology: Ontology) -> PromptSet:
    return PromptSet(style=STYLE_SPECIAL, prompts={key: "" for key in ontology.slot_keys()})


def expert_prompt_set(bank: QuestionBank) -> PromptSet:
    prompts = {}
    for key, questions in bank.entries.items():
        experts = [q for q in questions if q.expert]
        if not experts:
            raise PromptError(f"slot {key} has no expert question")
        prompts[key] = sorted(experts, key=lambda q: q.annotator)[0].text
    return PromptSet(style=STYLE_EXPERT, prompts=prompts)


def assign_series(bank: QuestionBank, n: int, include_expert: bool = False) -> list[PromptSet]:
    """Split a bank into n full prompt sets.

    Per slot, questions are ordered by annotator index and the i-th question
    goes to the i-th series; slots with fewer than n questions wrap around so
    every series still covers every slot.
    """
    if n < 1:
        raise PromptError(f"series count must be >= 1, got {n}")
    series: list[PromptSet] = [PromptSet(style=f"series-{i + 1}", prompts={}) for i in range(n)]
    for key in bank.entries:
        questions = bank.questions(key, include_expert=include_expert)
        if not questions:
            raise PromptError(f"slot {key} has no non-expert questions to assign")
        for i in range(n):
            series[i].prompts[key] = questions[i % len(questions)].text
    return series


def series_prompt_set(bank: QuestionBank, index: int, n: int | None = None) -> PromptSet:
    """The index-th (1-based) series; n defaults to the largest question count."""
    if n is None:
        n = max(len(bank.questions(key)) for key in bank.entries)
    if not 1 <= index <= n:
        raise PromptError(f"series index {index} outside 1..{n}")
    return assign_series(bank, n)[index - 1]


def build_prompt_set(
    style: str,
    ontology: Ontology,
    bank: QuestionBank | None = None,
    prompt_file: str | Path | None = None,
) -> PromptSet:
    """Construct the prompt set for a style name such as 'name' or 'series-2'."""
    if style == STYLE_NAME:
        ps = name_prompt_set(ontology)
    elif style == STYLE_DESCRIPTION:
        ps = description_prompt_set(ontology)
    elif style == STYLE_SPECIAL:
        ps = special_prompt_set(ontology)
    elif style == STYLE_EXPERT:
        if bank is None:
            raise PromptError("expert style needs a question bank")
        ps = expert_prompt_set(bank)
    elif style.startswith("series-"):
        if bank is None:
            raise PromptError("series styles need a question bank")
        ps = series_prompt_set(bank, int(style.split("-", 1)[1]))
    elif style == STYLE_CUSTOM:
        if prompt_file is None:
            raise PromptError("custom style needs a prompt file")
        ps = load_prompt_set(prompt_file)
    else:
        raise PromptError(f"unknown prompt style {style!r}")
    ps.validate_coverage(ontology)
    return ps


# ---------------------------------------------------------------------------
# Embedders
# ---------------------------------------------------------------------------

Embedder = Callable[[str], np.ndarray]


class HashedBagEmbedder:
    """Reference embedder: hashed bag of lowercased words, L2-normalized.

    Deterministic and dependency-free; meant as a stand-in when no external
    sentence embeddings are supplied.
    """

    def __init__(self, dim: int = 256):
        self.dim = dim

    def __call__(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dim)
        for word in text.lower().split():
            digest = hashlib.blake2b(word.encode("utf-8"), digest_size=8).digest()
            vec[int.from_bytes(digest, "big") % self.dim] += 1.0
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            vec[0] = 1.0
            return vec
        return vec / norm


class FileEmbedder:
    """Embeddings loaded from a JSON Lines file of {"text", "vector"} rows."""

    def __init__(self, path: str | Path):
        self.vectors: dict[str, np.ndarray] = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                vec = np.asarray(rec["vector"], dtype=float)
                norm = float(np.linalg.norm(vec))
                if norm == 0.0:
                    raise EmbeddingError(f"{path}:{lineno}: zero vector for {rec['text']!r}")
                self.vectors[rec["text"]] = vec / norm

    def __call__(self, text: str) -> np.ndarray:
        if text not in self.vectors:
            raise EmbeddingError(f"no embedding for text {text!r}")
        return self.vectors[text]


# ---------------------------------------------------------------------------
# Question statistics
# ---------------------------------------------------------------------------


@dataclass
class PairStats:
    mean: float
    std: float
    pairs: int


@dataclass
class SimilarityReport:
    pooled: PairStats
    per_slot: dict[SlotKey, PairStats] = field(default_factory=dict)


def pairwise_similarity_stats(
    bank: QuestionBank, embedder: Embedder, include_expert: bool = False
) -> SimilarityReport:
    """Cosine similarity over all unordered pairs of questions within a slot."""
    per_slot: dict[SlotKey, PairStats] = {}
    pooled: list[float] = []
    for key in bank.entries:
        questions = bank.questions(key, include_expert=include_expert)
        if len(questions) < 2:
            continue
        vectors = [embedder(q.text) for q in questions]
        sims = []
        for i in range(len(vectors)):
            for j in range(i + 1, len(vectors)):
                sims.append(float(np.clip(np.dot(vectors[i], vectors[j]), -1.0, 1.0)))
        per_slot[key] = _pair_stats(sims)
        pooled.extend(sims)
    if not pooled:
        raise PromptError("no slot has two or more questions")
    return SimilarityReport(pooled=_pair_stats(pooled), per_slot=per_slot)


def _pair_stats(values: list[float]) -> PairStats:
    mean = float(np.mean(values))
    std = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
    return PairStats(mean=mean, std=std, pairs=len(values))


@dataclass
class LengthStats:
    mean: float
    std: float
    median: float
    count: int


def length_stats(bank: QuestionBank, split_by_expert: bool = False) -> dict[str, LengthStats]:
    """Word-count statistics (whitespace words, sample std)."""
    groups: dict[str, list[int]] = {}
    for questions in bank.entries.values():
        for q in questions:
            group = ("expert" if q.expert else "non_expert") if split_by_expert else "all"
            groups.setdefault(group, []).append(len(q.text.split()))
    if not groups:
        raise PromptError("question bank is empty")
    out = {}
    for group, lengths in groups.items():
        out[group] = LengthStats(
            mean=float(np.mean(lengths)),
            std=float(np.std(lengths, ddof=1)) if len(lengths) > 1 else 0.0,
            median=float(statistics.median(lengths)),
            count=len(lengths),
        )
    return out


# ---------------------------------------------------------------------------
# Sub-word fragmentation
# ---------------------------------------------------------------------------


def _split_atoms(word: str) -> list[str]:
    """Maximal alphanumeric runs; every other character is its own atom."""
    atoms: list[str] = []
    run = ""
    for ch in word:
        if ch.isalnum():
            run += ch
        else:
            if run:
                atoms.append(run)
                run = ""
            atoms.append(ch)
    if run:
        atoms.append(run)
    return atoms


def _segment_atom(atom: str, vocabulary: set[str], allow_whole: bool) -> list[str]:
    pieces = []
    pos = 0
    while pos < len(atom):
        longest = len(atom) - pos
        if pos == 0 and not allow_whole:
            longest = min(longest, len(atom) - 1)
        piece = None
        for length in range(longest, 0, -1):
            chunk = atom[pos : pos + length]
            if chunk in vocabulary:
                piece = chunk
                break
        if piece is None:
            piece = atom[pos]
        pieces.append(piece)
        pos += len(piece)
    return pieces


def segment_word(word: str, vocabulary: set[str]) -> list[str]:
    """Greedy longest-match segmentation after punctuation splitting.

    Whole-word vocabulary hits stay intact. Within a fragmented word, an
    alphanumeric atom that is not word-initial cannot be consumed as one
    whole piece, mimicking sub-word vocabularies whose full-word entries
    exist only in word-initial position.
    """
    if not word:
        return []
    if word in vocabulary:
        return [word]
    pieces = []
    for j, atom in enumerate(_split_atoms(word)):
        allow_whole = j == 0 or not atom[0].isalnum()
        pieces.extend(_segment_atom(atom, vocabulary, allow_whole))
    return pieces


def fragmentation_report(text: str, vocabulary: set[str]) -> list[dict[str, Any]]:
    """Words of `text` that fragment into more than one piece."""
    report = []
    for word in text.split():
        pieces = segment_word(word, vocabulary)
        if len(pieces) > 1:
            report.append({"word": word, "pieces": pieces})
    return report
