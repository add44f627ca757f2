"""Turn failed score verdicts into paired enforcement prompts.

c1 states how the failed parts should be generated; c2 states how they are
currently (incorrectly) generated, using the detected value where one exists
and a negation where the match was blank. Counts render as digits ("2 bowl");
colors and relations reuse the template grammar.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .scene import InstanceRef
from .scoring import ScoreReport
from .template import ordinal_word, _RELATION_PHRASE


class ReviseError(ValueError):
    pass


@dataclass(frozen=True)
class CountError:
    category: str
    required: int
    detected: int


@dataclass(frozen=True)
class ColorError:
    instance: InstanceRef
    required: str
    detected: Optional[str]  # None: matched to blank


@dataclass(frozen=True)
class RelationError:
    subject: InstanceRef
    object: InstanceRef
    required: str
    detected: Optional[Tuple[str, ...]]  # None: undetermined (blank endpoint)


@dataclass(frozen=True)
class MisalignmentReport:
    count_errors: Tuple[CountError, ...]
    color_errors: Tuple[ColorError, ...]
    relation_errors: Tuple[RelationError, ...]

    @property
    def empty(self) -> bool:
        return not (self.count_errors or self.color_errors or self.relation_errors)


@dataclass(frozen=True)
class EnforcePair:
    c1: str
    c2: str


def diagnose(report: ScoreReport) -> MisalignmentReport:
    """Exactly the failed count/color/relation items under the winning matching."""
    counts = tuple(
        CountError(cat, n_k, m_k) for cat, (n_k, m_k) in report.counts.items() if n_k != m_k
    )
    colors = tuple(
        ColorError(v.instance, v.required, v.detected)
        for v in report.color_verdicts
        if not v.ok
    )
    relations = tuple(
        RelationError(v.subject, v.object, v.kind, v.detected)
        for v in report.relation_verdicts
        if not v.ok
    )
    return MisalignmentReport(counts, colors, relations)


def _instance_phrase(ref: InstanceRef) -> str:
    return f"The {ordinal_word(ref[1])} {ref[0]}"


def _relation_phrase(err: RelationError, kind: str, negate: bool = False) -> str:
    verb = "is not" if negate else "is"
    return (
        f"{_instance_phrase(err.subject)} {verb} "
        f"{_RELATION_PHRASE[kind]} the {ordinal_word(err.object[1])} {err.object[0]}"
    )


def build_enforce_pair(mis: MisalignmentReport) -> EnforcePair:
    """Clause order: counts, colors, relations, each in canonical scene order."""
    if mis.empty:
        raise ReviseError("nothing to enforce: the report has no failed items")
    c1: List[str] = []
    c2: List[str] = []
    for err in mis.count_errors:
        c1.append(f"{err.required} {err.category}")
        c2.append(f"{err.detected} {err.category}")
    for err in mis.color_errors:
        c1.append(f"{_instance_phrase(err.instance)} is {err.required}")
        if err.detected is not None:
            c2.append(f"{_instance_phrase(err.instance)} is {err.detected}")
        else:
            c2.append(f"{_instance_phrase(err.instance)} is not {err.required}")
    for err in mis.relation_errors:
        c1.append(_relation_phrase(err, err.required))
        detected_opposite = None
        if err.detected:
            on_axis = {"left", "right"} if err.required in ("left", "right") else {"above", "below"}
            axis_kinds = [k for k in err.detected if k in on_axis]
            detected_opposite = axis_kinds[0] if axis_kinds else None
        if detected_opposite is not None:
            c2.append(_relation_phrase(err, detected_opposite))
        else:
            c2.append(_relation_phrase(err, err.required, negate=True))
    return EnforcePair(". ".join(c1), ". ".join(c2))
