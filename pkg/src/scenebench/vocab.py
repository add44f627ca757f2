"""Color palette, relation kinds, and the category/color compatibility table."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Dict, FrozenSet, Tuple

# Fixed palette order; classify_color breaks ties by this order.
PALETTE: Tuple[str, ...] = ("green", "red", "yellow", "brown", "black", "white", "blue")
PALETTE_SET = frozenset(PALETTE)

RELATION_KINDS: Tuple[str, ...] = ("left", "right", "above", "below")
HORIZONTAL_KINDS = frozenset({"left", "right"})
VERTICAL_KINDS = frozenset({"above", "below"})

INVERSE_KIND = {"left": "right", "right": "left", "above": "below", "below": "above"}


class VocabError(ValueError):
    """Raised for palette/vocabulary violations."""


@dataclass(frozen=True)
class CompatibilityTable:
    """Maps each category to its permitted colors (non-empty subset of the palette)."""

    colors: Dict[str, FrozenSet[str]]

    def __post_init__(self):
        if not self.colors:
            raise VocabError("compatibility table is empty")
        for cat, cols in self.colors.items():
            if not cat or cat != cat.lower():
                raise VocabError(f"category name must be non-empty lowercase: {cat!r}")
            if not cols:
                raise VocabError(f"category {cat!r} has no permitted colors")
            bad = set(cols) - PALETTE_SET
            if bad:
                raise VocabError(f"category {cat!r} has colors outside the palette: {sorted(bad)}")

    @property
    def categories(self) -> Tuple[str, ...]:
        return tuple(self.colors)

    def __contains__(self, category: str) -> bool:
        return category in self.colors

    def permitted(self, category: str) -> FrozenSet[str]:
        try:
            return self.colors[category]
        except KeyError:
            raise VocabError(f"unknown category: {category!r}") from None

    @classmethod
    def from_mapping(cls, mapping) -> "CompatibilityTable":
        return cls({cat: frozenset(cols) for cat, cols in mapping.items()})

    @classmethod
    def from_file(cls, path) -> "CompatibilityTable":
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        return cls.from_mapping(doc["categories"])


def default_table() -> CompatibilityTable:
    """Built-in 66-category table. Plausible but non-canonical; user-replaceable."""
    text = resources.files("scenebench.data").joinpath("compat_table.json").read_text("utf-8")
    return CompatibilityTable.from_mapping(json.loads(text)["categories"])
