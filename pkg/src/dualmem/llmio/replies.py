"""Parsers for agent replies and the matching verdict formatter."""

from __future__ import annotations

import ast
import logging
import re

from ..domain import ConstraintSet, ConstraintSource, TaskKind, Verdict, Violation
from ..errors import ConstraintError, ExtractionParseError, IncompleteQueryError, ReplyParseError
from ..queryparse import ParseDiagnostics, build_constraint_set, parse_constraint_text

log = logging.getLogger(__name__)

_SCORE = re.compile(r"^\W*score\W*:\s*\**\s*(-?\d+)", re.I | re.M)
_VIOLATIONS = re.compile(r"^\W*(?:violated constraints|errors)\W*:\s*(.*)", re.I | re.M | re.S)
_NONE_LIKE = re.compile(r"^\W*(?:none|n/?a|no violations?(?: found)?|no errors?(?: found)?|nothing|\[\s*\]|-)\W*$", re.I)


def format_verdict(verdict: Verdict) -> str:
    """Render a verdict in the reply format the verifier prompt asks for."""
    if not verdict.violations:
        return f"Score: {verdict.score}\nViolated Constraints: None"
    lines = "\n".join(f"- {v.reason}" for v in verdict.violations)
    return f"Score: {verdict.score}\nViolated Constraints:\n{lines}"


def _split_violations(text: str) -> list[str]:
    text = text.strip()
    if not text or _NONE_LIKE.match(text):
        return []
    if text.startswith("[") and text.endswith("]"):
        try:
            value = ast.literal_eval(text)
        except (ValueError, SyntaxError):
            value = None
        if isinstance(value, list):
            return [str(v).strip() for v in value if str(v).strip()]
    items: list[str] = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        m = re.match(r"^(?:[-*•]|\d+[.)])\s+(.*)$", line)
        if m or not items:
            items.append((m.group(1) if m else line).strip())
        else:
            items[-1] += " " + line
    return [i for i in items if not _NONE_LIKE.match(i)]


def parse_verifier_reply(text: str) -> Verdict:
    """Read ``Score:`` and ``Violated Constraints:`` (or ``Errors:``) from a reply.

    Out-of-range scores are clamped with a warning. A reply claiming 100 while
    listing violations is downgraded to 99 so it is never accepted.
    """
    m = _SCORE.search(text or "")
    if not m:
        raise ReplyParseError("verifier reply has no 'Score:' line", text or "")
    score = int(m.group(1))
    if not 0 <= score <= 100:
        log.warning("verifier score %d clamped to [0, 100]", score)
        score = min(100, max(0, score))
    v = _VIOLATIONS.search(text[m.end() :])
    reasons = _split_violations(v.group(1)) if v else []
    if reasons and score == 100:
        log.warning("verifier reported 100 with %d violations; treating as not accepted", len(reasons))
        score = 99
    return Verdict(score, tuple(Violation(None, r) for r in reasons))


def parse_extractor_reply(task_kind: TaskKind, text: str) -> tuple[ConstraintSet, ParseDiagnostics]:
    items, diag = parse_constraint_text(task_kind, text or "")
    if not items:
        raise ExtractionParseError("no constraints recognized in extractor reply", text or "")
    try:
        cs = build_constraint_set(TaskKind.parse(task_kind), items, ConstraintSource.LLM_EXTRACT)
    except (IncompleteQueryError, ConstraintError) as exc:
        raise ExtractionParseError(str(exc), text) from exc
    return cs, diag
