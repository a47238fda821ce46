"""Baseline compensation of self-reports and class-label derivation."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .data import RATING_FIELDS, RATING_MAX, RATING_MIN, Ratings

LOW, HIGH = "low", "high"
QUADRANTS = ("HVHA", "LVHA", "LVLA", "HVLA")
# counterclockwise from the positive-valence axis, 45 degrees each
OCTANTS = ("pleased", "excited", "annoying", "nervous",
           "sad", "sleepy", "calm", "relaxed")


@dataclass(frozen=True)
class LabelSet:
    compensated: Ratings
    binary: dict[str, str]
    quadrant4: str
    octant8: str


def _check_rating(value: float, name: str) -> None:
    if not (RATING_MIN <= value <= RATING_MAX):
        raise ValueError(f"{name}={value!r} outside "
                         f"[{RATING_MIN:g}, {RATING_MAX:g}]")


def compensate_baseline(pre: float, post: float) -> float:
    """Shift the post-trial response by the pre-trial deviation from 5.

    The raw shift can leave the scale (pre=9, post=9 gives 13), so the
    result is clamped back to [1, 9].
    """
    _check_rating(pre, "pre")
    _check_rating(post, "post")
    return min(max(post + (pre - 5.0), RATING_MIN), RATING_MAX)


def binarize(v: float) -> str:
    """High iff v >= 5; the boundary counts as high."""
    _check_rating(v, "v")
    return HIGH if v >= 5.0 else LOW


def quadrant4(valence: float, arousal: float) -> str:
    pair = (binarize(valence), binarize(arousal))
    return {
        (HIGH, HIGH): "HVHA",
        (LOW, HIGH): "LVHA",
        (LOW, LOW): "LVLA",
        (HIGH, LOW): "HVLA",
    }[pair]


def octant8(valence: float, arousal: float) -> str:
    """45-degree sector of (valence, arousal) around the scale center.

    Angle 0 lies on the positive-valence axis and sectors are taken
    counterclockwise, lower edge inclusive; the exact center maps to the
    first sector.
    """
    _check_rating(valence, "valence")
    _check_rating(arousal, "arousal")
    dv, da = valence - 5.0, arousal - 5.0
    if dv == 0.0 and da == 0.0:
        return OCTANTS[0]
    theta = math.degrees(math.atan2(da, dv)) % 360.0
    return OCTANTS[min(int(theta // 45.0), 7)]


def make_labels(pre: Ratings, post: Ratings, compensate: bool) -> LabelSet:
    if compensate:
        vals = {f: compensate_baseline(getattr(pre, f), getattr(post, f))
                for f in RATING_FIELDS}
    else:
        vals = {f: float(getattr(post, f)) for f in RATING_FIELDS}
        for f in RATING_FIELDS:
            _check_rating(vals[f], f)
    comp = Ratings(**vals)
    return LabelSet(
        compensated=comp,
        binary={f: binarize(vals[f]) for f in RATING_FIELDS},
        quadrant4=quadrant4(comp.valence, comp.arousal),
        octant8=octant8(comp.valence, comp.arousal),
    )
