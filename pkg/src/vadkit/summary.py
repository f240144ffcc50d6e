"""Temporal windows and LLM summaries of the captions inside them."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .backends import BackendError
from .cleaning import CleanedCaptions
from .core import SampledSequence, TemporalWindow, VideoMeta

#: Instruction prepended to the newline-separated caption list.
SUMMARY_PROMPT = (
    "Please summarize what happened in few sentences, based on the following "
    "temporal description of a scene. Do not include any unnecessary details "
    "or descriptions."
)


@dataclass(frozen=True)
class SummaryRecord:
    video_id: str
    center_frame: int
    text: str
    window: TemporalWindow
    unsummarized: bool = False

    def __post_init__(self):
        if not self.text:
            raise ValueError("summary text must be nonempty")


def build_window(
    center: int,
    meta: VideoMeta,
    lattice: SampledSequence,
    window_seconds: float,
    frames_per_window: int,
) -> TemporalWindow:
    """Clip a window of the configured duration around a lattice frame.

    Members are the lattice frames nearest to uniformly spaced target
    times within the clipped span (duplicates collapse when the lattice
    is sparser than the targets). The center frame is always a candidate,
    so the window is never empty.
    """
    if window_seconds <= 0:
        raise ValueError("window_seconds must be > 0")
    if frames_per_window < 1:
        raise ValueError("frames_per_window must be >= 1")
    lattice.position_of(center)  # raises if off-lattice

    center_t = meta.frame_time(center)
    start_s = max(0.0, center_t - window_seconds / 2)
    end_s = min(meta.duration_s, center_t + window_seconds / 2)

    candidates = [
        f for f in lattice.indices if start_s <= meta.frame_time(f) <= end_s
    ]
    if not candidates:  # numerically possible only at the clip edges
        candidates = [center]
    times = np.array([meta.frame_time(f) for f in candidates])

    if frames_per_window == 1:
        targets = [(start_s + end_s) / 2]
    else:
        targets = np.linspace(start_s, end_s, frames_per_window)

    members = set()
    for t in targets:
        deltas = np.abs(times - t)
        members.add(candidates[int(np.argmin(deltas))])  # tie -> earlier frame

    return TemporalWindow(
        video_id=meta.video_id,
        center_frame=center,
        start_s=start_s,
        end_s=end_s,
        member_frames=tuple(sorted(members)),
    )


def render_summary_prompt(captions: Tuple[str, ...]) -> str:
    lines = [SUMMARY_PROMPT]
    lines += [f"{i}. {text}" for i, text in enumerate(captions, start=1)]
    return "\n".join(lines)


def summarize(
    window: TemporalWindow,
    cleaned: CleanedCaptions,
    llm,
    dedupe_consecutive: bool = False,
) -> SummaryRecord:
    """Ask the LLM to summarize the window's captions in temporal order.

    On permanent LLM failure the record falls back to the newline-joined
    caption list and is flagged unsummarized.
    """
    by_frame = cleaned.as_dict()
    captions = []
    for f in window.member_frames:
        if f not in by_frame:
            raise ValueError(
                f"{window.video_id}: frame {f} has no cleaned caption"
            )
        captions.append(by_frame[f].caption.text)

    if dedupe_consecutive:
        deduped = [captions[0]]
        for text in captions[1:]:
            if text != deduped[-1]:
                deduped.append(text)
        captions = deduped

    prompt = render_summary_prompt(tuple(captions))
    try:
        text = llm.complete(prompt)
    except BackendError:
        text = ""
    if not text.strip():
        return SummaryRecord(
            video_id=window.video_id,
            center_frame=window.center_frame,
            text="\n".join(captions),
            window=window,
            unsummarized=True,
        )
    return SummaryRecord(
        video_id=window.video_id,
        center_frame=window.center_frame,
        text=text,
        window=window,
    )
