"""Render a structured scene into its prompt text.

Template: "A photo-realistic image of [n_k] [category_k]. The [i-th]
[category_k] is [color_ik], [relation_ij]." Counts use number words,
ordinals use "first".."fifth", categories stay lowercase and unpluralized,
and each instance's relation clauses follow its color clause.
"""

from __future__ import annotations

from typing import List

from .scene import RelationSpec, StructuredScene

NUMBER_WORDS = ("zero", "one", "two", "three", "four", "five")
ORDINAL_WORDS = ("zeroth", "first", "second", "third", "fourth", "fifth")

_RELATION_PHRASE = {
    "left": "on the left of",
    "right": "on the right of",
    "above": "above",
    "below": "below",
}


class TemplateError(ValueError):
    pass


def number_word(n: int) -> str:
    if not 1 <= n < len(NUMBER_WORDS):
        raise TemplateError(f"no number word for {n}")
    return NUMBER_WORDS[n]


def ordinal_word(n: int) -> str:
    if not 1 <= n < len(ORDINAL_WORDS):
        raise TemplateError(f"no ordinal word for {n}")
    return ORDINAL_WORDS[n]


def relation_clause(rel: RelationSpec) -> str:
    return f"{_RELATION_PHRASE[rel.kind]} the {ordinal_word(rel.object[1])} {rel.object[0]}"


def fill_template(scene: StructuredScene) -> str:
    if scene.total < 1:
        raise TemplateError("cannot render an empty scene")
    counts = scene.category_counts
    head = ", ".join(f"{number_word(counts[cat])} {cat}" for cat in scene.categories)
    sentences: List[str] = [f"A photo-realistic image of {head}."]
    for inst in scene.instances:
        if inst.color is None:
            raise TemplateError(f"instance {inst.ref} has no color to render")
        clause = f"The {ordinal_word(inst.ordinal)} {inst.category} is {inst.color}"
        for rel in scene.relations:
            if rel.subject == inst.ref:
                clause += f", {relation_clause(rel)}"
        sentences.append(clause + ".")
    return " ".join(sentences)


def word_count(prompt: str) -> int:
    return len(prompt.split())
