"""Closed arcs and finite unions of arcs on the unit circle.

Angles are radians. ``start`` may be an mpmath ``mpf`` when the arc comes out
of an extended-precision computation. An arc is stored as ``(start, length)`` rather than as two
endpoints so that arcs far shorter than the spacing of doubles near ``start``
(lengths like ``1e-30``) keep full relative precision; every routine that
needs positions inside an arc works with offsets from ``start``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import mpmath
import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Arc:
    """Closed arc ``{e^{i(start + s)} : 0 <= s <= length}``."""

    start: float
    length: float

    def __post_init__(self) -> None:
        if not (self.length > 0.0):
            raise ValueError(f"arc length must be positive, got {self.length!r}")
        if self.length > TWO_PI:
            raise ValueError(f"arc length exceeds 2*pi: {self.length!r}")
        if isinstance(self.start, mpmath.mpf):
            # keep extended precision so arcs much shorter than double spacing stay placed
            start = self.start % (2 * mpmath.pi)
        else:
            start = float(self.start) % TWO_PI
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "length", float(self.length))

    @classmethod
    def centered(cls, center: float, length: float) -> "Arc":
        return cls(center - 0.5 * length, length)

    @property
    def is_full(self) -> bool:
        return self.length >= TWO_PI

    @property
    def end(self) -> float:
        """Right endpoint, unwrapped (may exceed 2*pi)."""
        return float(self.start) + self.length

    @property
    def center(self) -> float:
        return (float(self.start) + 0.5 * self.length) % TWO_PI

    @property
    def chord_radius(self) -> float:
        """Radius of the smallest disk containing the arc."""
        if self.length >= math.pi:
            return 1.0
        return math.sin(0.5 * self.length)

    def contains(self, theta, tol: float = 0.0):
        """Membership test for angles ``theta`` (vectorised)."""
        if self.is_full:
            return np.ones_like(np.asarray(theta, dtype=float), dtype=bool)
        off = np.mod(np.asarray(theta, dtype=float) - float(self.start), TWO_PI)
        return (off <= self.length + tol) | (off >= TWO_PI - tol)

    def offset(self, theta):
        """Signed offset of ``theta`` from the arc start, reduced to [-pi, pi)."""
        return np.mod(np.asarray(theta, dtype=float) - float(self.start) + math.pi, TWO_PI) - math.pi

    def widened(self, eps: float) -> "Arc":
        """The closed eps-neighbourhood (in angle) of the arc."""
        new_len = self.length + 2.0 * eps
        if new_len >= TWO_PI:
            return Arc(0.0, TWO_PI)
        return Arc(self.start - eps, new_len)

    def sample(self, k: int) -> np.ndarray:
        """``k`` offsets in [0, length], clustered at both endpoints."""
        t = 0.5 * (1.0 - np.cos(np.linspace(0.0, math.pi, k)))
        return self.length * t


class ArcSet(Sequence[Arc]):
    """Disjoint closed arcs sorted by start angle.

    Overlapping or touching input arcs are merged. The empty set is allowed
    only when constructed explicitly with no arcs.
    """

    def __init__(self, arcs: Iterable[Arc] = ()):
        self._arcs: tuple[Arc, ...] = _merge(list(arcs))

    @classmethod
    def full(cls) -> "ArcSet":
        return cls([Arc(0.0, TWO_PI)])

    @classmethod
    def from_intervals(cls, intervals: Iterable[tuple[float, float]]) -> "ArcSet":
        """Build from ``(a, b)`` pairs with ``a < b`` (radians, unwrapped)."""
        return cls(Arc(a, b - a) for a, b in intervals)

    def __getitem__(self, i):
        return self._arcs[i]

    def __len__(self) -> int:
        return len(self._arcs)

    def __iter__(self) -> Iterator[Arc]:
        return iter(self._arcs)

    def __repr__(self) -> str:
        body = ", ".join(f"({float(a.start):.6g}, {a.length:.6g})" for a in self._arcs)
        return f"ArcSet([{body}])"

    def __eq__(self, other) -> bool:
        return isinstance(other, ArcSet) and self._arcs == other._arcs

    def __hash__(self) -> int:
        return hash(self._arcs)

    @property
    def count(self) -> int:
        return len(self._arcs)

    @property
    def is_empty(self) -> bool:
        return not self._arcs

    @property
    def is_full(self) -> bool:
        return len(self._arcs) == 1 and self._arcs[0].is_full

    @property
    def total_length(self) -> float:
        return math.fsum(a.length for a in self._arcs)

    @property
    def normalized_measure(self) -> float:
        """Normalised Lebesgue measure ``m(E)``."""
        return self.total_length / TWO_PI

    def contains(self, theta, tol: float = 0.0):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape, dtype=bool)
        for a in self._arcs:
            out |= a.contains(theta, tol)
        return out

    def widened(self, eps: float) -> "ArcSet":
        return ArcSet(a.widened(eps) for a in self._arcs)

    def rotated(self, phi: float) -> "ArcSet":
        return ArcSet(Arc(a.start + phi, a.length) for a in self._arcs)

    def gaps(self) -> list[tuple[float, float]]:
        """Complementary open arcs as ``(start, length)``, one after each arc."""
        p = len(self._arcs)
        if p == 0 or self.is_full:
            return []
        out = []
        for j, a in enumerate(self._arcs):
            nxt = self._arcs[(j + 1) % p]
            g = (nxt.start - a.start) % TWO_PI - a.length
            if p == 1:
                g = TWO_PI - a.length
            out.append((a.end % TWO_PI, g))
        return out

    def unwrapped(self) -> list[tuple[float, float]]:
        """Arcs as ``(start, length)`` with starts increasing inside one period.

        The period is cut in the middle of the largest gap, so differences of
        unwrapped angles between points of ``E`` never reach 2*pi.
        """
        if not self._arcs:
            return []
        if self.is_full:
            return [(0.0, TWO_PI)]
        gaps = self.gaps()
        jmax = max(range(len(gaps)), key=lambda j: gaps[j][1])
        p = len(self._arcs)
        order = [(jmax + 1 + i) % p for i in range(p)]
        base = self._arcs[order[0]].start
        out = []
        for j in order:
            a = self._arcs[j]
            out.append((base + (a.start - base) % TWO_PI, a.length))
        return out


def _merge(arcs: list[Arc]) -> tuple[Arc, ...]:
    if not arcs:
        return ()
    if any(a.is_full for a in arcs):
        return (Arc(0.0, TWO_PI),)
    arcs = sorted(arcs, key=lambda a: a.start)
    merged: list[list[float]] = []
    for a in arcs:
        if merged and a.start <= merged[-1][0] + merged[-1][1]:
            cur = merged[-1]
            cur[1] = max(cur[1], a.start + a.length - cur[0])
        else:
            merged.append([a.start, a.length])
    # wrap-around: last arc may reach past 2*pi into the first one
    if len(merged) > 1:
        last, first = merged[-1], merged[0]
        overshoot = last[0] + last[1] - TWO_PI
        if overshoot >= first[0]:
            last[1] = max(last[1], first[0] + first[1] + TWO_PI - last[0])
            merged.pop(0)
    out = []
    for s, length in merged:
        if length >= TWO_PI:
            return (Arc(0.0, TWO_PI),)
        out.append(Arc(s, length))
    return tuple(sorted(out, key=lambda a: a.start))


def harmonic_length_sum(arcs: Iterable[Arc]) -> float:
    """``sum 1/log(1/|I|)`` over arcs (lengths in radians, each < 1)."""
    total = 0.0
    for a in arcs:
        if a.length >= 1.0:
            return math.inf
        total += 1.0 / math.log(1.0 / a.length)
    return total


def arcs_from_mask(theta: np.ndarray, mask: np.ndarray) -> ArcSet:
    """Arcs spanned by runs of ``True`` in a uniform periodic grid mask."""
    theta = np.asarray(theta, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    if mask.all():
        return ArcSet.full()
    if not mask.any():
        return ArcSet()
    h = TWO_PI / len(theta)
    shift = int(np.argmin(mask))
    m = np.roll(mask, -shift)
    th = np.roll(theta, -shift)
    out = []
    i = 0
    n = len(m)
    while i < n:
        if m[i]:
            j = i
            while j + 1 < n and m[j + 1]:
                j += 1
            out.append(Arc(th[i] - 0.5 * h, (j - i + 1) * h))
            i = j + 1
        else:
            i += 1
    return ArcSet(out)


def as_arcset(E: ArcSet | Sequence[Arc] | Arc) -> ArcSet:
    if isinstance(E, ArcSet):
        return E
    if isinstance(E, Arc):
        return ArcSet([E])
    return ArcSet(E)


def random_arcset(rng: np.random.Generator, p: int, min_length: float = 0.05, min_gap: float = 0.05) -> ArcSet:
    """``p`` disjoint arcs with lengths and gaps at least the given minima.

    The circle is cut into ``2p`` alternating arc/gap pieces whose lengths are
    the minima plus a Dirichlet share of what is left.
    """
    if p < 1:
        raise ValueError("p must be positive")
    spare = TWO_PI - p * (min_length + min_gap)
    if spare <= 0:
        raise ValueError("minimum lengths leave no room on the circle")
    share = rng.dirichlet(np.ones(2 * p)) * spare
    start = rng.uniform(0.0, TWO_PI)
    arcs = []
    for j in range(p):
        length = min_length + share[2 * j]
        arcs.append(Arc(start, length))
        start += length + min_gap + share[2 * j + 1]
    return ArcSet(arcs)
