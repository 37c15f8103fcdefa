"""Success coverage versus iteration cap.

For each cap K the table counts sessions that finished within K turns (by
success or by running out of turns) and the successes among them.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Mapping

from ..domain import SessionTrace
from ..errors import EvalConfigError


def pct(part: int, whole: int) -> Decimal:
    """Percentage rounded half-up to two decimals (71.625 -> 71.63)."""
    if whole == 0:
        return Decimal("0.00")
    return (Decimal(100) * part / Decimal(whole)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)


@dataclass(frozen=True)
class CoverageRow:
    cap: int
    queries_finished: int
    pct_of_dataset: Decimal
    successes: int
    pct_of_successes: Decimal
    delta_successes: int | None
    successes_remaining: int
    pct_remaining: Decimal


def coverage_from_counts(total: int, finished_at: Mapping[int, int], succeeded_at: Mapping[int, int], caps) -> list[CoverageRow]:
    """Build rows from per-turn counts of finished and successful sessions."""
    caps = list(caps)
    if total <= 0:
        raise EvalConfigError("coverage needs at least one session")
    if caps != sorted(caps) or len(set(caps)) != len(caps):
        raise EvalConfigError("caps must be strictly increasing")
    all_successes = sum(succeeded_at.values())
    rows, prev = [], None
    for k in caps:
        finished = sum(c for t, c in finished_at.items() if t <= k)
        won = sum(c for t, c in succeeded_at.items() if t <= k)
        left = all_successes - won
        rows.append(
            CoverageRow(
                cap=k,
                queries_finished=finished,
                pct_of_dataset=pct(finished, total),
                successes=won,
                pct_of_successes=pct(won, all_successes),
                delta_successes=None if prev is None else won - prev,
                successes_remaining=left,
                pct_remaining=pct(left, all_successes),
            )
        )
        prev = won
    return rows


def _outcome(trace) -> tuple[int, bool]:
    if isinstance(trace, SessionTrace):
        return trace.turns_used, trace.accepted
    return int(trace["turns_used"]), bool(trace["accepted"])


def coverage_table(traces: Iterable, caps) -> list[CoverageRow]:
    """Coverage rows from session traces or their serialized records."""
    outcomes = [_outcome(t) for t in traces]
    if not outcomes:
        raise EvalConfigError("coverage needs at least one trace")
    finished = Counter(turns for turns, _ in outcomes)
    succeeded = Counter(turns for turns, ok in outcomes if ok)
    return coverage_from_counts(len(outcomes), finished, succeeded, caps)


def _num(d: Decimal) -> str:
    text = f"{d:.2f}".rstrip("0").rstrip(".")
    return text or "0"


def format_coverage(rows: list[CoverageRow]) -> str:
    header = (
        "iteration cap K",
        "#queries finished <= K",
        "% of dataset",
        "#Success (score=100) <= K",
        "% of all successes",
        "+ Successes vs prev. cap",
        "Success remaining",
    )
    body = [
        (
            str(r.cap),
            f"{r.queries_finished:,}",
            f"{_num(r.pct_of_dataset)}%",
            f"{r.successes:,}",
            f"{_num(r.pct_of_successes)}%",
            "-" if r.delta_successes is None else f"{r.delta_successes:+d}",
            f"{r.successes_remaining:,} ({_num(r.pct_remaining)}%)",
        )
        for r in rows
    ]
    widths = [max(len(h), *(len(b[i]) for b in body)) for i, h in enumerate(header)]
    lines = [" | ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines.append("-+-".join("-" * w for w in widths))
    lines += [" | ".join(c.rjust(w) for c, w in zip(b, widths)) for b in body]
    return "\n".join(lines)
