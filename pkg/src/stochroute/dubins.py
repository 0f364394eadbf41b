"""Shortest Dubins paths between oriented poses and per-vehicle cost matrices.

All six candidate words (LSL, RSR, LSR, RSL, RLR, LRL) are evaluated in the
normalized frame where the start pose sits at the origin heading along +x is
not assumed; instead the segment between the endpoints defines the reference
angle. Segment parameters are expressed in units of the turn radius, so the
path length is always ``radius * sum(segment_params)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi

#: Candidate words in tie-break order: equal-length candidates resolve to the
#: earliest word in this tuple.
WORDS = ("LSL", "RSR", "LSR", "RSL", "RLR", "LRL")

#: Slack allowed when clamping inverse-trig arguments / sqrt operands that sit
#: marginally outside their domain due to roundoff. Beyond this the word is
#: declared infeasible.
DOMAIN_EPS = 1e-12

#: Diagonal marker of a cost matrix: the routing graph has no self-loops.
NO_EDGE = math.inf


def norm_angle(a: float) -> float:
    """Reduce an angle to [0, 2*pi). A full 2*pi arc maps to 0."""
    a = math.fmod(a, TWO_PI)
    if a < 0.0:
        a += TWO_PI
    if a >= TWO_PI:  # fmod roundoff can land exactly on 2*pi
        a -= TWO_PI
    return a


@dataclass(frozen=True)
class Pose:
    """Planar position plus heading, the configuration of a vertex visit."""

    x: float
    y: float
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", norm_angle(self.theta))


@dataclass(frozen=True)
class DubinsPath:
    """One feasible Dubins path: word, per-segment parameters, radius, length.

    ``segment_params`` are nonnegative and measured in radius units (arc
    angles for turn segments, length/radius for the straight segment).
    """

    word: str
    segment_params: tuple
    radius: float
    length: float = field(default=None)

    def __post_init__(self):
        if self.length is None:
            object.__setattr__(
                self, "length", self.radius * sum(self.segment_params)
            )


def _sqrt_guard(v: float):
    if v < 0.0:
        if v < -DOMAIN_EPS:
            return None
        v = 0.0
    return math.sqrt(v)


def _acos_guard(v: float):
    if v > 1.0:
        if v > 1.0 + DOMAIN_EPS:
            return None
        v = 1.0
    elif v < -1.0:
        if v < -1.0 - DOMAIN_EPS:
            return None
        v = -1.0
    return math.acos(v)


def _lsl(alpha, beta, d, sa, sb, ca, cb, c_ab):
    p = _sqrt_guard(2.0 + d * d - 2.0 * c_ab + 2.0 * d * (sa - sb))
    if p is None:
        return None
    tmp = math.atan2(cb - ca, d + sa - sb)
    return norm_angle(-alpha + tmp), p, norm_angle(beta - tmp)


def _rsr(alpha, beta, d, sa, sb, ca, cb, c_ab):
    p = _sqrt_guard(2.0 + d * d - 2.0 * c_ab + 2.0 * d * (sb - sa))
    if p is None:
        return None
    tmp = math.atan2(ca - cb, d - sa + sb)
    return norm_angle(alpha - tmp), p, norm_angle(-beta + tmp)


def _lsr(alpha, beta, d, sa, sb, ca, cb, c_ab):
    p = _sqrt_guard(-2.0 + d * d + 2.0 * c_ab + 2.0 * d * (sa + sb))
    if p is None:
        return None
    tmp = math.atan2(-ca - cb, d + sa + sb) - math.atan2(-2.0, p)
    return norm_angle(-alpha + tmp), p, norm_angle(-norm_angle(beta) + tmp)


def _rsl(alpha, beta, d, sa, sb, ca, cb, c_ab):
    p = _sqrt_guard(d * d - 2.0 + 2.0 * c_ab - 2.0 * d * (sa + sb))
    if p is None:
        return None
    tmp = math.atan2(ca + cb, d - sa - sb) - math.atan2(2.0, p)
    return norm_angle(alpha - tmp), p, norm_angle(beta - tmp)


def _rlr(alpha, beta, d, sa, sb, ca, cb, c_ab):
    mid = _acos_guard((6.0 - d * d + 2.0 * c_ab + 2.0 * d * (sa - sb)) / 8.0)
    if mid is None:
        return None
    p = norm_angle(TWO_PI - mid)
    t = norm_angle(alpha - math.atan2(ca - cb, d - sa + sb) + p / 2.0)
    q = norm_angle(alpha - beta - t + p)
    return t, p, q


def _lrl(alpha, beta, d, sa, sb, ca, cb, c_ab):
    mid = _acos_guard((6.0 - d * d + 2.0 * c_ab + 2.0 * d * (sb - sa)) / 8.0)
    if mid is None:
        return None
    p = norm_angle(TWO_PI - mid)
    t = norm_angle(-alpha - math.atan2(ca - cb, d + sa - sb) + p / 2.0)
    q = norm_angle(norm_angle(beta) - alpha - t + p)
    return t, p, q


_WORD_FUNCS = {
    "LSL": _lsl,
    "RSR": _rsr,
    "LSR": _lsr,
    "RSL": _rsl,
    "RLR": _rlr,
    "LRL": _lrl,
}


def _normalize_problem(start: Pose, end: Pose, radius: float):
    dx = end.x - start.x
    dy = end.y - start.y
    d = math.hypot(dx, dy) / radius
    phi = math.atan2(dy, dx)
    alpha = norm_angle(start.theta - phi)
    beta = norm_angle(end.theta - phi)
    return alpha, beta, d


def word_candidate(word: str, start: Pose, end: Pose, radius: float):
    """Path of the given word from start to end, or None if infeasible."""
    if radius <= 0.0:
        raise ValueError("turn radius must be positive")
    if word not in _WORD_FUNCS:
        raise ValueError(f"unknown Dubins word {word!r}")
    alpha, beta, d = _normalize_problem(start, end, radius)
    params = _WORD_FUNCS[word](
        alpha, beta, d,
        math.sin(alpha), math.sin(beta),
        math.cos(alpha), math.cos(beta),
        math.cos(alpha - beta),
    )
    if params is None:
        return None
    return DubinsPath(word=word, segment_params=params, radius=radius)


def shortest_path(start: Pose, end: Pose, radius: float) -> DubinsPath:
    """Minimum-length path over all six words; ties go to the earliest word."""
    best = None
    for word in WORDS:
        cand = word_candidate(word, start, end, radius)
        if cand is not None and (best is None or cand.length < best.length):
            best = cand
    assert best is not None, "a CSC word always exists for radius > 0"
    return best


def cost_matrix(poses, radius: float) -> np.ndarray:
    """Asymmetric matrix of shortest Dubins lengths; NO_EDGE on the diagonal."""
    if not poses:
        raise ValueError("poses must be non-empty")
    n = len(poses)
    c = np.full((n, n), NO_EDGE)
    for i in range(n):
        for j in range(n):
            if i != j:
                c[i, j] = shortest_path(poses[i], poses[j], radius).length
    return c


def _advance(x, y, theta, seg_type: str, s: float, radius: float):
    """Move distance s along one segment type from (x, y, theta)."""
    if seg_type == "S":
        return x + s * math.cos(theta), y + s * math.sin(theta), theta
    phi = s / radius
    if seg_type == "L":
        nt = theta + phi
        return (
            x + radius * (math.sin(nt) - math.sin(theta)),
            y - radius * (math.cos(nt) - math.cos(theta)),
            nt,
        )
    # right turn
    nt = theta - phi
    return (
        x - radius * (math.sin(nt) - math.sin(theta)),
        y + radius * (math.cos(nt) - math.cos(theta)),
        nt,
    )


def path_end_pose(path: DubinsPath, start: Pose) -> Pose:
    """Pose reached by following the path from start (used for validation)."""
    x, y, theta = start.x, start.y, start.theta
    for seg_type, param in zip(path.word, path.segment_params):
        x, y, theta = _advance(x, y, theta, seg_type, param * path.radius, path.radius)
    return Pose(x, y, theta)


def sample_path(path: DubinsPath, start: Pose, step: float):
    """Polyline along the path with spacing <= step; includes both endpoints."""
    if step <= 0.0:
        raise ValueError("step must be positive")
    total = path.length
    if total == 0.0:
        return [(start.x, start.y)]
    n = max(1, int(math.ceil(total / step)))
    seg_lens = [p * path.radius for p in path.segment_params]
    points = []
    for m in range(n + 1):
        s = total * m / n
        x, y, theta = start.x, start.y, start.theta
        remaining = s
        for seg_type, seg_len in zip(path.word, seg_lens):
            d = min(remaining, seg_len)
            x, y, theta = _advance(x, y, theta, seg_type, d, path.radius)
            remaining -= d
            if remaining <= 0.0:
                break
        points.append((x, y))
    return points
