"""LLM anomaly-score elicitation and parsing.

Scores are requested as one value from the 11-point grid {0.0, 0.1, ...,
1.0}. The same elicitation path serves both the temporal summaries (the
main pipeline) and raw frame captions (the no-summary ablation baseline).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal, InvalidOperation
from typing import Optional, Sequence, Tuple

from .backends import BackendError
from .core import SCORE_LEVELS

BASE_CONTEXT_PROMPT = (
    "How would you rate the scene described on a scale from 0 to 1, with 0 "
    "representing a standard scene and 1 denoting a scene with suspicious "
    "activities?"
)

IMPERSONATION_PREFIX = "If you were a law enforcement agency, "

ANOMALY_PRIOR_SUBJECT = "suspicious or potentially criminal activities"

FORMAT_PROMPT = (
    "Please provide the response in the form of a Python list and respond "
    "with only one number in the provided list below "
    "[0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0] without any "
    "textual explanation. It should begin with '[' and end with ']'."
)

_BRACKET_SPAN = re.compile(r"\[([^\[\]]*)\]")
_NUMBER = re.compile(r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?")


def render_context_prompt(impersonation: bool, anomaly_prior: bool) -> str:
    """Compose the context prompt for the four ablation variants."""
    prompt = BASE_CONTEXT_PROMPT
    if anomaly_prior:
        prompt = prompt.replace("suspicious activities", ANOMALY_PRIOR_SUBJECT)
    if impersonation:
        prompt = IMPERSONATION_PREFIX + prompt[0].lower() + prompt[1:]
    return prompt


@dataclass(frozen=True)
class PromptVariant:
    impersonation: bool
    anomaly_prior: bool

    @property
    def rendered_context(self) -> str:
        return render_context_prompt(self.impersonation, self.anomaly_prior)


@dataclass(frozen=True)
class ScoreElicitation:
    subject_text: str
    raw_completion: str
    parsed: Optional[float]
    attempts: int

    @property
    def failed(self) -> bool:
        return self.parsed is None


def snap_to_grid(value: float | Decimal) -> float:
    """Clamp to [0, 1], then snap to the nearest grid score; ties go up."""
    v = value if isinstance(value, Decimal) else Decimal(repr(value))
    v = min(max(v, Decimal(0)), Decimal(1))
    k = int((v * 10).to_integral_value(rounding=ROUND_HALF_UP))
    return SCORE_LEVELS[k]


def parse_score(completion: str) -> Optional[float]:
    """Extract the first bracketed single number, snapped to the score grid.

    Bracketed spans holding anything other than one real number (for
    example an echo of the whole score list) are skipped. Returns None
    when no span qualifies.
    """
    for span in _BRACKET_SPAN.finditer(completion):
        inner = span.group(1).strip()
        if not _NUMBER.fullmatch(inner):
            continue
        try:
            value = Decimal(inner)
        except InvalidOperation:
            continue
        return snap_to_grid(value)
    return None


def render_score_prompt(variant: PromptVariant, subject: str) -> str:
    """Context and format prompts joined by a space, subject on its own line."""
    return f"{variant.rendered_context} {FORMAT_PROMPT}\n{subject}"


def score_text(
    subject: str,
    variant: PromptVariant,
    llm,
    retry_limit: int,
) -> ScoreElicitation:
    """Elicit a grid score for one subject, re-querying on parse failures."""
    if not subject:
        raise ValueError("subject must be nonempty")
    prompt = render_score_prompt(variant, subject)
    completion = ""
    attempts = 0
    for _ in range(retry_limit + 1):
        attempts += 1
        try:
            completion = llm.complete(prompt)
        except BackendError:
            completion = ""
        parsed = parse_score(completion)
        if parsed is not None:
            return ScoreElicitation(
                subject_text=subject,
                raw_completion=completion,
                parsed=parsed,
                attempts=attempts,
            )
    return ScoreElicitation(
        subject_text=subject,
        raw_completion=completion,
        parsed=None,
        attempts=attempts,
    )


def assemble_initial_scores(
    elicitations: Sequence[ScoreElicitation],
    frame_indices: Sequence[int],
) -> Tuple[Tuple[float, ...], bool]:
    """Fill elicitation failures from the temporally nearest success.

    Ties between an earlier and a later neighbor resolve to the earlier
    frame. Returns (scores, all_failed); a fully failed video scores 0.0
    everywhere and must be flagged by the caller.
    """
    if len(elicitations) != len(frame_indices):
        raise ValueError("one elicitation per sampled frame is required")
    parsed = [e.parsed for e in elicitations]
    successes = [
        (frame_indices[i], score) for i, score in enumerate(parsed) if score is not None
    ]
    if not successes:
        return tuple(0.0 for _ in frame_indices), True

    scores = []
    for i, frame in enumerate(frame_indices):
        if parsed[i] is not None:
            scores.append(parsed[i])
            continue
        nearest = min(successes, key=lambda fs: (abs(fs[0] - frame), fs[0]))
        scores.append(nearest[1])
    return tuple(scores), False
