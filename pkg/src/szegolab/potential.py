"""Equilibrium measures and logarithmic capacity of finite unions of arcs.

Two independent solvers are provided. The energy solver minimises the
logarithmic energy of a piecewise-constant density on a graded mesh (a convex
quadratic program). The parametric solver uses the classical representation

    phi(t) = (N / 2 pi) prod_j |e^{it} - e^{i beta_j}| / sqrt(|e^{it} - e^{i a_j}| |e^{it} - e^{i b_j}|)

with one point ``beta_j`` inside every gap, fixed by requiring the analytic
continuation of ``phi`` to integrate to zero across each gap.

Geometry is handled in a cyclic segment layout ``[L_0, G_0, L_1, G_1, ...]``
(arc, gap, arc, ...). A point is a segment index plus its offsets from both
ends of the segment, and distances are sums of positive lengths, so arcs much
shorter than double spacing near their position keep full relative accuracy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import mpmath
import numpy as np
from scipy import optimize

from .arcs import TWO_PI, Arc, ArcSet, as_arcset

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gauss(order: int) -> tuple[np.ndarray, np.ndarray]:
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def _graded_rule(a: float, b: float, grade_a: bool, grade_b: bool, levels: int = 48,
                 order: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule on [a, b], geometrically graded toward singular ends."""
    if not (b > a):
        return np.zeros(0), np.zeros(0)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    pts = {a, b, mid}

    def depth(end: float) -> int:
        # innermost panel must stay well above the spacing of doubles at the end point
        if end == 0.0:
            return levels
        return max(1, min(levels, int(math.log2(half / (256.0 * abs(end) * 2.2e-16)))))

    if grade_a:
        pts.update(a + half * 2.0 ** (-np.arange(1, depth(a))))
    if grade_b:
        pts.update(b - half * 2.0 ** (-np.arange(1, depth(b))))
    edges = np.array(sorted(pts))
    edges = edges[np.concatenate(([True], np.diff(edges) > 0))]
    x, w = _gauss(order)
    lo, hi = edges[:-1, None], edges[1:, None]
    nodes = 0.5 * (hi - lo) * x[None, :] + 0.5 * (hi + lo)
    weights = 0.5 * (hi - lo) * w[None, :]
    return nodes.ravel(), weights.ravel()


def _log_chord(d):
    """``log |e^{id} - 1|`` for signed angular distances ``|d| <= pi``-ish."""
    with np.errstate(divide="ignore"):
        return np.log(np.abs(2.0 * np.sin(0.5 * np.asarray(d, dtype=float))))


def _log_sinc(v):
    """``log(sin v / v)`` for ``|v| < pi``."""
    return np.log(np.sinc(np.asarray(v, dtype=float) / math.pi))


class EquilibriumError(RuntimeError):
    """A solver did not converge or the two solvers disagree."""

    def __init__(self, message: str, values: dict | None = None):
        super().__init__(message)
        self.values = values or {}


# --------------------------------------------------------------------------
# cyclic layout
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class _Layout:
    arcs: ArcSet
    seg: np.ndarray  # [L_0, G_0, L_1, G_1, ...]
    fwd: np.ndarray  # fwd[s, t]: total length strictly between s and t going forward
    bwd: np.ndarray

    @classmethod
    def of(cls, arcs: ArcSet) -> "_Layout":
        gaps = arcs.gaps()
        seg = []
        for a, (_, g) in zip(arcs, gaps):
            seg += [float(a.length), float(g)]
        seg = np.array(seg)
        m = len(seg)
        fwd = np.zeros((m, m))
        bwd = np.zeros((m, m))
        for s in range(m):
            for t in range(m):
                if s == t:
                    continue
                k = (s + 1) % m
                acc = []
                while k != t:
                    acc.append(seg[k])
                    k = (k + 1) % m
                fwd[s, t] = math.fsum(acc)
                k = (s - 1) % m
                acc = []
                while k != t:
                    acc.append(seg[k])
                    k = (k - 1) % m
                bwd[s, t] = math.fsum(acc)
        return cls(arcs, seg, fwd, bwd)

    @property
    def p(self) -> int:
        return len(self.seg) // 2

    def dist(self, s: int, o, oc, t: int, q, qc):
        """Signed shortest distance from points ``(s, o, oc)`` to ``(t, q, qc)``."""
        o, oc, q, qc = (np.asarray(v, dtype=float) for v in (o, oc, q, qc))
        if s == t:
            return q - o
        f = oc + self.fwd[s, t] + q
        b = o + self.bwd[s, t] + qc
        return np.where(f <= b, f, -b)

    def locate(self, theta) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Segment index and offsets of float angles."""
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        seg_idx = np.empty(theta.shape, dtype=int)
        off = np.empty(theta.shape)
        best = np.full(theta.shape, np.inf)
        for k, a in enumerate(self.arcs):
            rel = np.mod(theta - float(a.start), TWO_PI)
            in_arc = rel <= a.length
            # the gap after arc k starts at its end
            cand_seg = np.where(in_arc, 2 * k, 2 * k + 1)
            cand_off = np.where(in_arc, rel, rel - a.length)
            better = rel < best
            seg_idx[better] = cand_seg[better]
            off[better] = cand_off[better]
            best[better] = rel[better]
        length = self.seg[seg_idx]
        off = np.clip(off, 0.0, length)
        return seg_idx, off, length - off

    def endpoint_targets(self):
        """``(segment, q, qc)`` for every arc start and every arc end."""
        out = []
        for k in range(self.p):
            out.append(("start", k, 2 * k, 0.0, self.seg[2 * k]))
            out.append(("end", k, 2 * k + 1, 0.0, self.seg[2 * k + 1]))
        return out

    def angle(self, s: int, o: float) -> float:
        a = self.arcs[s // 2]
        base = float(a.start) if s % 2 == 0 else float(a.start) + a.length
        return (base + o) % TWO_PI


# --------------------------------------------------------------------------
# result type
# --------------------------------------------------------------------------


@dataclass
class EquilibriumResult:
    """Equilibrium measure of ``arcs`` with total mass ``normalization``.

    ``offsets[k]`` and ``density[k]`` sample ``phi`` on arc ``k`` (offsets from
    the arc start); ``betas`` are the interlacing angles (parametric method).
    ``energy`` and ``capacity`` refer to the unit-mass measure.
    """

    arcs: ArcSet
    normalization: float
    method: str
    offsets: list
    density: list
    betas: tuple | None
    energy: float
    capacity: float
    potential_fn: Callable = field(repr=False)
    diagnostics: dict = field(default_factory=dict)

    @property
    def log_capacity(self) -> float:
        return -self.energy

    def potential(self, theta) -> np.ndarray:
        """``U(e^{i theta}) = int log|e^{i theta} - e^{it}| d nu(t)`` at float angles."""
        return self.potential_fn(theta)

    def to_json(self) -> dict:
        return {
            "arcs": [[repr(float(a.start)), repr(a.length)] for a in self.arcs],
            "normalization": repr(float(self.normalization)),
            "method": self.method,
            "betas": None if self.betas is None else [repr(float(b)) for b in self.betas],
            "energy": repr(float(self.energy)),
            "capacity": repr(float(self.capacity)),
            "diagnostics": {k: (repr(float(v)) if isinstance(v, float) else v) for k, v in self.diagnostics.items()},
        }


def _circle_result(arcs: ArcSet, normalization: float, method: str) -> EquilibriumResult:
    off = np.linspace(0.0, TWO_PI, 65)
    return EquilibriumResult(
        arcs, normalization, method, [off], [np.full(off.shape, normalization / TWO_PI)], None,
        0.0, 1.0, lambda th: np.zeros(np.shape(th)), {"flatness": 0.0},
    )


# --------------------------------------------------------------------------
# parametric solver
# --------------------------------------------------------------------------


class _Parametric:
    """The density formula with interlacing points at gap fractions ``u``."""

    def __init__(self, layout: _Layout, u: np.ndarray):
        self.L = layout
        self.u = np.asarray(u, dtype=float)
        p = layout.p
        self.beta = []  # (segment, q, qc)
        for k in range(p):
            G = layout.seg[2 * k + 1]
            self.beta.append((2 * k + 1, G * self.u[k], G * (1.0 - self.u[k])))

    def log_factor(self, s: int, o, oc):
        """Log of the density formula without the ``N/2pi`` factor and without own-segment endpoint factors.

        The own-segment factor is replaced by ``-1/2 log sinc`` terms, i.e. the
        result is ``log(f) + 1/2 log(o * oc)`` where ``f`` is the (absolute)
        formula value.
        """
        Lay = self.L
        out = np.zeros(np.shape(o))
        for t, q, qc in self.beta:
            out = out + _log_chord(Lay.dist(s, o, oc, t, q, qc))
        own = {s, (s + 1) % len(Lay.seg)}
        for _, _, t, q, qc in Lay.endpoint_targets():
            if t in own and q == 0.0:
                continue
            out = out - 0.5 * _log_chord(Lay.dist(s, o, oc, t, q, qc))
        out = out - 0.5 * (_log_sinc(0.5 * np.asarray(o)) + _log_sinc(0.5 * np.asarray(oc)))
        return out

    def smooth_integrand(self, s: int, svar):
        """``f(t) dt / ds`` under ``t = offset + len * sin^2(s/2)``; smooth in ``s``."""
        length = self.L.seg[s]
        o = length * np.sin(0.5 * svar) ** 2
        oc = length * np.cos(0.5 * svar) ** 2
        return np.exp(self.log_factor(s, o, oc)), o, oc

    def gap_residual(self, k: int) -> float:
        s = 2 * k + 1
        sb = 2.0 * math.atan2(math.sqrt(self.u[k]), math.sqrt(1.0 - self.u[k]))
        total = 0.0
        for lo, hi, sign in ((0.0, sb, -1.0), (sb, math.pi, 1.0)):
            x, w = _graded_rule(lo, hi, True, True)
            f, _, _ = self.smooth_integrand(s, x)
            total += sign * float(np.dot(w, f))
        return total

    def gap_scale(self, k: int) -> float:
        x, w = _graded_rule(0.0, math.pi, True, True)
        f, _, _ = self.smooth_integrand(2 * k + 1, x)
        return float(np.dot(w, f))

    def arc_mass(self, k: int, s_lo: float = 0.0, s_hi: float = math.pi) -> float:
        """Unit-formula mass ``(1/2pi) int f`` over the arc piece ``s in [s_lo, s_hi]``."""
        x, w = _graded_rule(s_lo, s_hi, s_lo == 0.0, s_hi == math.pi)
        f, _, _ = self.smooth_integrand(2 * k, x)
        return float(np.dot(w, f)) / TWO_PI

    def log_integral(self, k: int, point: tuple, s_lo: float = 0.0, s_hi: float = math.pi) -> float:
        """``(1/2pi) int log|e^{i theta} - e^{it}| f(t) dt`` over arc ``k`` (pieces in ``s``)."""
        s_seg = 2 * k
        ps, po, poc = point
        length = self.L.seg[s_seg]
        if ps == s_seg:
            s0 = 2.0 * math.atan2(math.sqrt(po), math.sqrt(poc))
            total = 0.0
            for lo, hi in ((s_lo, min(s0, s_hi)), (max(s0, s_lo), s_hi)):
                if hi <= lo:
                    continue
                x, w = _graded_rule(lo, hi, True, True)
                f, o, oc = self.smooth_integrand(s_seg, x)
                d = length * np.sin(0.5 * (x + s0)) * np.sin(0.5 * (x - s0))
                total += float(np.dot(w, f * _log_chord(d)))
            return total / TWO_PI
        x, w = _graded_rule(s_lo, s_hi, True, True)
        f, o, oc = self.smooth_integrand(s_seg, x)
        d = self.L.dist(s_seg, o, oc, ps, po, poc)
        return float(np.dot(w, f * _log_chord(d))) / TWO_PI

    def potential_at(self, point: tuple) -> float:
        """Unit-formula potential at a layout point."""
        return sum(self.log_integral(k, point) for k in range(self.L.p))

    def log_derivative(self, s: int, o, oc):
        """``d/dt log phi`` inside arc segment ``s`` (the cotangent formula)."""
        Lay = self.L
        out = np.zeros(np.shape(o))
        for t, q, qc in self.beta:
            out = out - 0.5 / np.tan(0.5 * Lay.dist(s, o, oc, t, q, qc))
        for _, _, t, q, qc in Lay.endpoint_targets():
            out = out + 0.25 / np.tan(0.5 * Lay.dist(s, o, oc, t, q, qc))
        return out


def _solve_parametric(layout: _Layout, tol: float = 1e-12) -> _Parametric:
    p = layout.p
    if p == 1:
        return _Parametric(layout, np.array([0.5]))

    def residual(v):
        u = 1.0 / (1.0 + np.exp(-v))
        par = _Parametric(layout, u)
        return np.array([par.gap_residual(k) / par.gap_scale(k) for k in range(p)])

    sol = optimize.root(residual, np.zeros(p), method="hybr", tol=tol)
    r = residual(sol.x)
    if not np.all(np.isfinite(r)) or np.max(np.abs(r)) > 1e-9:
        raise EquilibriumError("parametric gap conditions did not converge",
                               {"residual": float(np.max(np.abs(r)))})
    return _Parametric(layout, 1.0 / (1.0 + np.exp(-sol.x)))


def _parametric_result(arcs: ArcSet, normalization: float, samples: int) -> EquilibriumResult:
    layout = _Layout.of(arcs)
    par = _solve_parametric(layout)
    masses = [par.arc_mass(k) for k in range(layout.p)]
    total = math.fsum(masses)
    logcaps = [par.potential_at((2 * k, 0.0, layout.seg[2 * k])) for k in range(layout.p)]
    logcap = float(np.mean(logcaps))
    offsets, dens = [], []
    for k in range(layout.p):
        length = layout.seg[2 * k]
        sv = np.linspace(0.0, math.pi, samples + 2)[1:-1]
        o = length * np.sin(0.5 * sv) ** 2
        oc = length * np.cos(0.5 * sv) ** 2
        f = np.exp(par.log_factor(2 * k, o, oc)) / np.sqrt(o * oc)
        offsets.append(o)
        dens.append(normalization * f / TWO_PI)

    def potential(theta):
        seg, o, oc = layout.locate(theta)
        vals = [par.potential_at((int(s), float(a), float(b))) for s, a, b in zip(seg, o, oc)]
        return normalization * np.array(vals).reshape(np.shape(theta))

    betas = tuple(layout.angle(t, q) for t, q, _ in par.beta)
    diag = {
        "normalization_residual": abs(total - 1.0),
        "flatness": float(np.max(logcaps) - np.min(logcaps)),
        "gap_fractions": [float(x) for x in par.u],
    }
    if abs(total - 1.0) > 1e-8:
        raise EquilibriumError("parametric density does not integrate to the normalization",
                               {"mass": total})
    res = EquilibriumResult(arcs, normalization, "parametric", offsets, dens, betas, -logcap,
                            math.exp(logcap), potential, diag)
    res._parametric = par  # kept for the discretization step
    res._layout = layout
    return res


# --------------------------------------------------------------------------
# energy solver
# --------------------------------------------------------------------------


def _G(u):
    u = np.asarray(u, dtype=float)
    au = np.abs(u)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = 0.5 * u * u * np.log(au) - 0.75 * u * u
    return np.where(au > 0, val, 0.0)


def _H(u):
    u = np.asarray(u, dtype=float)
    au = np.abs(u)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = u * np.log(au) - u
    return np.where(au > 0, val, 0.0)


@dataclass(frozen=True)
class _Mesh:
    seg: np.ndarray  # segment index per cell (always an arc segment)
    c: np.ndarray  # centre offset from the arc start
    cc: np.ndarray  # centre offset from the arc end
    h: np.ndarray  # width


def _cells_per_arc(layout: _Layout, cells: int) -> list[int]:
    # widths stay below about pi/16 so the sinc remainder is well resolved
    return [max(cells, int(math.ceil(10.0 * layout.seg[2 * k]))) for k in range(layout.p)]


def _mesh(layout: _Layout, counts: list[int]) -> _Mesh:
    seg, c, cc, h = [], [], [], []
    for k in range(layout.p):
        length = layout.seg[2 * k]
        m = counts[k]
        a = 0.5 * math.pi * np.arange(m + 1) / m
        lo, hi = a[:-1], a[1:]
        width = length * np.sin(lo + hi) * np.sin(hi - lo)
        # centre of [sin^2 lo, sin^2 hi] and its complement, both without cancellation
        ctr = length * 0.5 * (np.sin(lo) ** 2 + np.sin(hi) ** 2)
        ctrc = length * 0.5 * (np.cos(lo) ** 2 + np.cos(hi) ** 2)
        seg.append(np.full(m, 2 * k))
        c.append(ctr)
        cc.append(ctrc)
        h.append(width)
    return _Mesh(np.concatenate(seg), np.concatenate(c), np.concatenate(cc), np.concatenate(h))


def _centre_distances(layout: _Layout, mesh: _Mesh, ps, po, poc) -> np.ndarray:
    """Signed distances from points (one segment ``ps``) to all cell centres; shape (points, cells)."""
    po = np.atleast_1d(po)[:, None]
    poc = np.atleast_1d(poc)[:, None]
    out = np.empty((po.shape[0], len(mesh.c)))
    for s in np.unique(mesh.seg):
        cols = mesh.seg == s
        out[:, cols] = layout.dist(ps, po, poc, int(s), mesh.c[cols][None, :], mesh.cc[cols][None, :])
    return out


def _interaction_matrix(layout: _Layout, mesh: _Mesh, order: int = 8) -> np.ndarray:
    """``A[i, k] = int_cell_i int_cell_k log|e^{ix} - e^{iy}| dx dy``."""
    n = len(mesh.c)
    D = np.empty((n, n))
    for s in np.unique(mesh.seg):
        rows = mesh.seg == s
        D[rows, :] = _centre_distances(layout, mesh, int(s), mesh.c[rows], mesh.cc[rows])
    hi = mesh.h[:, None]
    hk = mesh.h[None, :]
    x, w = _gauss(order)
    xi = 0.5 * x
    near = np.abs(D) <= 1.5 * (hi + hk)
    A = np.empty((n, n))
    # far pairs: tensor Gauss rule of the full kernel
    u = D[:, :, None, None] + xi[None, None, :, None] * hi[:, :, None, None] - xi[None, None, None, :] * hk[:, :, None, None]
    ww = 0.25 * w[:, None] * w[None, :]
    kern = _log_chord(u)
    rem = _log_sinc(0.5 * u)
    full = np.einsum("ijab,ab->ij", kern, ww) * hi * hk
    A[:] = full
    if near.any():
        a = D - 0.5 * hi
        b = D + 0.5 * hi
        c = -0.5 * hk
        d = 0.5 * hk
        logpart = _G(b - c) - _G(a - c) - _G(b - d) + _G(a - d)
        smooth = np.einsum("ijab,ab->ij", rem, ww) * hi * hk
        A[near] = (logpart + smooth)[near]
    return A


def _cell_potential(layout: _Layout, mesh: _Mesh, ps: int, po, poc, order: int = 8) -> np.ndarray:
    """``B[j, i] = int_cell_i log|e^{i theta_j} - e^{iy}| dy`` for points in segment ``ps``."""
    D = _centre_distances(layout, mesh, ps, po, poc)
    h = mesh.h[None, :]
    x, w = _gauss(order)
    u = D[:, :, None] - 0.5 * x[None, None, :] * h[:, :, None]
    far = np.einsum("jia,a->ji", _log_chord(u), 0.5 * w) * h
    near = np.abs(D) <= 1.5 * h
    if near.any():
        logpart = _H(D + 0.5 * h) - _H(D - 0.5 * h)
        smooth = np.einsum("jia,a->ji", _log_sinc(0.5 * u), 0.5 * w) * h
        far = np.where(near, logpart + smooth, far)
    return far


def _minimise(layout: _Layout, mesh: _Mesh) -> tuple[np.ndarray, float]:
    A = _interaction_matrix(layout, mesh)
    K = -0.5 * (A + A.T) / np.outer(mesh.h, mesh.h)
    n = len(mesh.c)
    active = np.ones(n, dtype=bool)
    # equality-constrained minimiser, then drop negative cells (active set)
    for _ in range(n):
        Ka = K[np.ix_(active, active)]
        x = np.linalg.solve(Ka, np.ones(active.sum()))
        w = np.zeros(n)
        w[active] = x / x.sum()
        if (w[active] >= 0).all():
            break
        active &= w > 0
    else:  # pragma: no cover
        raise EquilibriumError("energy minimisation did not settle")
    return w, float(w @ K @ w)


def _energy_result(arcs: ArcSet, normalization: float, cells: int) -> EquilibriumResult:
    layout = _Layout.of(arcs)
    counts = _cells_per_arc(layout, cells)
    _, coarse = _minimise(layout, _mesh(layout, counts))
    mesh = _mesh(layout, [2 * m for m in counts])
    w, fine = _minimise(layout, mesh)
    n = len(mesh.c)
    # the discrete energy converges like m^-2 on the graded mesh
    energy = (4.0 * fine - coarse) / 3.0

    offsets, dens = [], []
    for k in range(layout.p):
        sel = mesh.seg == 2 * k
        offsets.append(mesh.c[sel])
        dens.append(normalization * w[sel] / mesh.h[sel])

    def potential(theta):
        seg, o, oc = layout.locate(theta)
        out = np.empty(o.shape)
        for s in np.unique(seg):
            sel = seg == s
            B = _cell_potential(layout, mesh, int(s), o[sel], oc[sel])
            out[sel] = B @ (w / mesh.h)
        return normalization * out.reshape(np.shape(theta))

    # flatness at cell centres (the collocation points of the discrete problem)
    U = np.empty(n)
    for s in np.unique(mesh.seg):
        sel = mesh.seg == s
        U[sel] = _cell_potential(layout, mesh, int(s), mesh.c[sel], mesh.cc[sel]) @ (w / mesh.h)
    diag = {"cells": n, "flatness": float(np.max(U) - np.min(U)), "min_weight": float(w.min()),
            "energy_fine": fine, "energy_coarse": coarse}
    res = EquilibriumResult(arcs, normalization, "energy", offsets, dens, None, energy,
                            math.exp(-energy), potential, diag)
    res._layout = layout
    return res


# --------------------------------------------------------------------------
# public interface
# --------------------------------------------------------------------------


def equilibrium_measure(E, normalization: float = 1.0, method: str = "energy", cross_check: bool = False,
                        rtol: float = 1e-3, cells: int = 32, samples: int = 64) -> EquilibriumResult:
    """Equilibrium measure of a finite union of closed arcs.

    Parameters
    ----------
    E : ArcSet, Arc or sequence of arcs
    normalization : float
        Total mass of the returned measure.
    method : {"energy", "parametric"}
    cross_check : bool
        Also run the other solver and raise :class:`EquilibriumError` when the
        capacities differ by more than ``rtol`` (relative).
    cells : int
        Minimum number of cells per arc on the coarse energy mesh; the energy is
        extrapolated from this mesh and one with twice as many cells.
    """
    arcs = as_arcset(E)
    if arcs.is_empty:
        raise ValueError("equilibrium measure of the empty set")
    if not (normalization > 0):
        raise ValueError("normalization must be positive")
    if method not in ("energy", "parametric"):
        raise ValueError(f"unknown method {method!r}")
    if arcs.is_full:
        return _circle_result(arcs, normalization, method)
    if method == "energy":
        res = _energy_result(arcs, normalization, cells)
    else:
        res = _parametric_result(arcs, normalization, samples)
    if cross_check:
        other = _parametric_result(arcs, 1.0, 8) if method == "energy" else _energy_result(arcs, 1.0, cells)
        rel = abs(other.capacity - res.capacity) / res.capacity
        res.diagnostics["cross_check_rel"] = rel
        if rel > rtol:
            raise EquilibriumError(
                f"energy and parametric capacities disagree: {res.capacity!r} vs {other.capacity!r}",
                {res.method: res.capacity, other.method: other.capacity},
            )
    return res


def capacity(E, method: str = "energy") -> float:
    """Logarithmic capacity of a finite union of closed arcs."""
    return equilibrium_measure(E, 1.0, method).capacity


# --------------------------------------------------------------------------
# discretization of the equilibrium measure
# --------------------------------------------------------------------------

LOG2 = math.log(2.0)
PIECE_MASS = 0.25
PIECE_LENGTH = math.pi / 8


def piece_budget(n: int) -> tuple[int, bool]:
    """Allowed number of pieces ``N`` and whether the constant was enlarged.

    For ``n >= 14`` the budget is ``14 n``. Below that, ``13 n + 16`` covers
    the critical-point pieces, the ``4 n`` mass cuts and the ``16`` length cuts.
    """
    if n >= 14:
        return 14 * n, False
    return 13 * n + 16, True


def omega_constant(n: int) -> tuple[float, bool]:
    """``C_1`` such that ``Omega > C_1 n`` makes the capacity certificate close."""
    N, enlarged = piece_budget(n)
    if not enlarged:
        return 80.0, False
    # 2 * 4^{2 N_max} < e^{Omega/2} and 4^{3 N_max} e^{-3 Omega / 2} <= 1/2
    need = max(4.0 * N * math.log(4.0) + 2.0 * LOG2, (2.0 * N * math.log(4.0) + 2.0 * LOG2) * 2.0 / 3.0)
    return math.ceil(need / n), True


@dataclass(frozen=True)
class Piece:
    arc: int
    s_lo: float
    s_hi: float
    mass: float
    length: float


@dataclass
class DiscretizationCertificate:
    n: int
    p: int
    N: int
    degree: int
    piece_budget: int
    enlarged_constants: bool
    C: float
    C1: float
    log_capacity: float
    critical_points: int
    max_piece_mass: float
    max_piece_length: float
    max_log_excess: float  # grid max of log|P| - U - 3 log2 N on E
    max_log_abs_on_E: float
    inner_margin: float  # min over probes of rhs - lhs of the per-piece inequality
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        out = {}
        for k, v in self.__dict__.items():
            out[k] = repr(float(v)) if isinstance(v, float) else v
        out["passed"] = self.passed
        return out


class DiscretizationResult:
    def __init__(self, polynomial, pieces, zeros, certificate, equilibrium):
        self.polynomial = polynomial
        self.pieces = pieces
        self.zeros = zeros  # (segment, offset, complement) per distinct zero, with multiplicity
        self.certificate = certificate
        self.equilibrium = equilibrium

    def __iter__(self):
        return iter((self.polynomial, self.certificate))


def _critical_points(par: _Parametric, k: int, samples: int = 4001) -> list[float]:
    length = par.L.seg[2 * k]

    def g(s):
        s = np.asarray(s, dtype=float)
        return par.log_derivative(2 * k, length * np.sin(0.5 * s) ** 2, length * np.cos(0.5 * s) ** 2)

    sv = np.linspace(0.0, math.pi, samples)[1:-1]
    gv = g(sv)
    out = []
    for i in np.nonzero(np.sign(gv[:-1]) != np.sign(gv[1:]))[0]:
        out.append(optimize.brentq(lambda x: float(g(x)), sv[i], sv[i + 1], xtol=1e-15))
    return out


def _offset(length: float, s: float) -> tuple[float, float]:
    return length * math.sin(0.5 * s) ** 2, length * math.cos(0.5 * s) ** 2


def _span(length: float, s_lo: float, s_hi: float) -> float:
    """Arc length between parameters ``s_lo < s_hi`` without cancellation."""
    return length * math.sin(0.5 * (s_hi + s_lo)) * math.sin(0.5 * (s_hi - s_lo))


def _split_arc(par: _Parametric, k: int, n: float) -> tuple[list[Piece], int]:
    length = par.L.seg[2 * k]
    crit = _critical_points(par, k)
    # a critical point sitting on a cut goes to the left piece
    cuts = [0.0] + crit + [math.pi]
    pieces = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        M = n * par.arc_mass(k, lo, hi)
        parts = max(1, math.ceil(M / PIECE_MASS * (1.0 + 1e-9)))
        edges = [lo]
        for j in range(1, parts):
            target = M * j / parts
            f = lambda s: n * par.arc_mass(k, lo, s) - target
            edges.append(optimize.brentq(f, edges[-1], hi, xtol=1e-15))
        edges.append(hi)
        for a, b in zip(edges[:-1], edges[1:]):
            span = _span(length, a, b)
            parts2 = int(span // PIECE_LENGTH) + 1
            if parts2 == 1:
                pieces.append(Piece(k, a, b, n * par.arc_mass(k, a, b), span))
                continue
            # equal-length cuts in the offset variable
            oa, _ = _offset(length, a)
            sub = [a]
            for j in range(1, parts2):
                o = oa + span * j / parts2
                sub.append(2.0 * math.asin(math.sqrt(o / length)))
            sub.append(b)
            for c, d in zip(sub[:-1], sub[1:]):
                pieces.append(Piece(k, c, d, n * par.arc_mass(k, c, d), _span(length, c, d)))
    return pieces, len(crit)


def _inner_lhs(par: _Parametric, piece: Piece, s0: float, n: float) -> float:
    """``4 int_piece phi(t) log(1/|t - theta|) dt`` with ``theta`` at parameter ``s0``."""
    length = par.L.seg[2 * piece.arc]
    total = 0.0
    for lo, hi in ((piece.s_lo, s0), (s0, piece.s_hi)):
        x, w = _graded_rule(lo, hi, lo == s0 or lo == 0.0, hi == s0 or hi == math.pi)
        f, _, _ = par.smooth_integrand(2 * piece.arc, x)
        d = np.abs(length * np.sin(0.5 * (x + s0)) * np.sin(0.5 * (x - s0)))
        total += float(np.dot(w, f * -np.log(d)))
    return 4.0 * n * total / TWO_PI


def discretization_polynomial(E, n: int, probes: int = 32, grid_per_piece: int = 64, strict: bool = True,
                              ctx=None) -> DiscretizationResult:
    """Monic polynomial with zeros at the endpoints of a fine split of ``E``.

    The equilibrium measure of ``E`` with total mass ``n`` is cut into pieces
    on which its density is monotone, which carry mass at most 1/4 and which
    are shorter than ``pi/8``. The polynomial has a zero at both ends of every
    piece, so its degree is twice the number ``N`` of pieces, and
    ``log|P| <= n log cap(E) + 3 N log 2`` on ``E``.

    Returns a :class:`DiscretizationResult`; unpacking gives
    ``(polynomial, certificate)``. With ``strict`` a failed check raises
    :class:`~szegolab.polynomials.ConstructionError`.
    """
    from .polynomials import ConstructionError
    from .precision import resolve, to_mpf
    from .szego import CirclePolynomial

    arcs = as_arcset(E)
    if arcs.is_empty or arcs.is_full:
        raise ValueError("need a proper nonempty union of arcs")
    if len(arcs) > n:
        raise ValueError(f"{len(arcs)} arcs exceed n = {n}")
    eq = equilibrium_measure(arcs, float(n), "parametric", samples=8)
    par: _Parametric = eq._parametric
    layout = par.L
    pieces: list[Piece] = []
    ncrit = 0
    for k in range(layout.p):
        pk, c = _split_arc(par, k, float(n))
        pieces += pk
        ncrit += c
    N = len(pieces)
    budget, enlarged = piece_budget(n)
    C1, _ = omega_constant(n)

    # zeros: both ends of every piece (shared ends become double zeros)
    zeros: dict[tuple[int, float], list] = {}
    for pc in pieces:
        length = layout.seg[2 * pc.arc]
        for s in (pc.s_lo, pc.s_hi):
            key = (pc.arc, s)
            if key in zeros:
                zeros[key][1] += 1
            else:
                zeros[key] = [_offset(length, s), 1]
    zero_list = [(2 * k, o, oc, m) for (k, _), ((o, oc), m) in zeros.items()]

    def log_abs_P(seg: int, o, oc):
        out = np.zeros(np.shape(o))
        for zs, zo, zoc, m in zero_list:
            out = out + m * _log_chord(layout.dist(seg, o, oc, zs, zo, zoc))
        return out

    U = n * eq.log_capacity
    bound = U + 3.0 * LOG2 * N
    excess = -math.inf
    max_log = -math.inf
    margin = math.inf
    with np.errstate(divide="ignore"):
        for pc in pieces:
            length = layout.seg[2 * pc.arc]
            sv = np.linspace(pc.s_lo, pc.s_hi, grid_per_piece)
            o = length * np.sin(0.5 * sv) ** 2
            oc = length * np.cos(0.5 * sv) ** 2
            lp = log_abs_P(2 * pc.arc, o, oc)
            max_log = max(max_log, float(np.max(lp)))
            excess = max(excess, float(np.max(lp)) - bound)
            # interior probes for the per-piece logarithmic inequality
            for s0 in pc.s_lo + (pc.s_hi - pc.s_lo) * (np.arange(probes) + 0.5) / probes:
                lhs = _inner_lhs(par, pc, float(s0), float(n))
                dl = _span(length, pc.s_lo, s0)
                dr = _span(length, s0, pc.s_hi)
                rhs = 3.0 * math.log(1.0 / (dl * dr)) + 2.0
                margin = min(margin, rhs - lhs)

    checks = {
        "pieces_within_budget": N <= budget,
        "degree_within_C_n": 2 * N <= 2 * budget,
        "piece_mass": max(pc.mass for pc in pieces) <= PIECE_MASS * (1.0 + 1e-8),
        "piece_length": max(pc.length for pc in pieces) < PIECE_LENGTH,
        "log_bound_on_E": excess <= 1e-9 * max(1.0, abs(bound)),
        "inner_inequality": margin >= 0.0,
    }
    cert = DiscretizationCertificate(
        n=n, p=layout.p, N=N, degree=2 * N, piece_budget=budget, enlarged_constants=enlarged,
        C=2.0 * budget / n, C1=C1, log_capacity=eq.log_capacity, critical_points=ncrit,
        max_piece_mass=max(pc.mass for pc in pieces), max_piece_length=max(pc.length for pc in pieces),
        max_log_excess=excess, max_log_abs_on_E=max_log, inner_margin=margin, checks=checks,
    )

    ctx = resolve(ctx)
    with ctx.workprec():
        angles, mults = [], []
        for (k, s), ((o, _), m) in zeros.items():
            angles.append(to_mpf(arcs[k].start) + mpmath.mpf(o))
            mults.append(m)
        P = CirclePolynomial.from_unimodular_zeros(angles, mults, ctx)
    result = DiscretizationResult(P, pieces, zero_list, cert, eq)
    if strict and not cert.passed:
        failed = [k for k, v in checks.items() if not v]
        raise ConstructionError(f"discretization checks failed: {failed}", cert)
    return result


# --------------------------------------------------------------------------
# certificates for super-exponential decay
# --------------------------------------------------------------------------


def _json_value(v):
    from .precision import mp_str

    if isinstance(v, (mpmath.mpf, mpmath.mpc)):
        return mp_str(v)
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, ArcSet):
        return [[_json_value(a.start), repr(a.length)] for a in v]
    if isinstance(v, dict):
        return {k: _json_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    return v


@dataclass
class Certificate:
    """Outcome of one certification run.

    ``hypotheses`` and ``checks`` map names to booleans; ``status`` is
    ``"certified"``, ``"failed"`` (a conclusion check failed) or
    ``"precondition"`` (the hypotheses do not hold, nothing is claimed).
    """

    kind: str
    n: int
    omega: object
    hypotheses: dict
    checks: dict
    measured: dict
    arcs: ArcSet | None = None
    polynomial: object = None
    precision_bits: int = 256

    @property
    def status(self) -> str:
        if not all(self.hypotheses.values()):
            return "precondition"
        return "certified" if all(self.checks.values()) else "failed"

    @property
    def passed(self) -> bool:
        return self.status == "certified"

    def failed_checks(self) -> list[str]:
        return [k for k, v in {**self.hypotheses, **self.checks}.items() if not v]

    def to_json(self) -> dict:
        with mpmath.workprec(self.precision_bits):
            return {
                "kind": self.kind,
                "n": self.n,
                "omega": _json_value(self.omega),
                "status": self.status,
                "hypotheses": _json_value(self.hypotheses),
                "checks": _json_value(self.checks),
                "measured": _json_value(self.measured),
                "arcs": None if self.arcs is None else _json_value(self.arcs),
            }


def _mp_center(a: Arc):
    return mpmath.mpf(a.start) + mpmath.mpf(a.length) / 2


def _omega_from(res, Omega):
    """``Omega`` as given, or ``-log e_n``; ``None`` when ``e_n = 0`` and nothing was given."""
    if Omega is not None:
        return mpmath.mpf(Omega)
    if res.e_n == 0:
        return None
    return -mpmath.log(res.e_n)


def _sublevel_certificate(kind: str, measure, n: int, Omega, ctx):
    from .polynomials import sublevel_arcs
    from .precision import resolve
    from .szego import szego_en

    ctx = resolve(ctx)
    with ctx.workprec():
        res = szego_en(measure, n, ctx)
        Om = _omega_from(res, Omega)
        measured = {"e_n": res.e_n}
        if Om is None:
            hyp = {"omega_defined": False}
            return ctx, res, None, Certificate(kind, n, None, hyp, {}, measured, precision_bits=ctx.mantissa_bits)
        # Omega = -log e_n must pass despite the rounding of exp(log(.))
        slack = 1 + mpmath.mpf(2) ** (-(ctx.mantissa_bits // 2))
        hyp = {"omega_positive": Om > 0, "e_n_le_exp_minus_omega": res.e_n <= mpmath.exp(-Om) * slack}
        if not all(hyp.values()):
            return ctx, res, Om, Certificate(kind, n, Om, hyp, {}, measured, precision_bits=ctx.mantissa_bits)
        level = mpmath.exp(-Om / 2)
        sub = sublevel_arcs(res.extremal, level, ctx)
        arcs = sub.arcs
        residual = measure.mass_outside(arcs, ctx)
        measured.update({"level": level, "arc_count": len(arcs), "residual": residual})
        cert = Certificate(kind, n, Om, hyp, {}, measured, arcs, res.extremal, ctx.mantissa_bits)
        cert.checks["arc_count_le_n"] = len(arcs) <= n
        cert.checks["residual_le_exp_minus_omega"] = residual <= mpmath.exp(-Om)
        return ctx, res, Om, cert


def certify_metric_A(measure, n: int, Omega=None, ctx=None) -> Certificate:
    """Cover all but ``e^{-Omega}`` of the mass by ``p <= n`` short arcs.

    With ``Omega`` omitted, ``Omega = -log e_n``. The arcs are the sublevel set
    ``{|Q| <= e^{-Omega/2}}`` of the extremal polynomial ``Q``; the certificate
    checks ``sum 1/log(1/|I|) <= 8 n log n / Omega`` and the residual mass.
    """
    ctx, res, Om, cert = _sublevel_certificate("metric_A", measure, n, Omega, ctx)
    cert.hypotheses["n_ge_3"] = n >= 3
    if Om is None or "level" not in cert.measured:
        return cert
    with ctx.workprec():
        cert.hypotheses["omega_ge_16_n_log_n"] = Om >= 16 * n * math.log(n)
        lengths = [a.length for a in cert.arcs]
        hsum = math.inf if any(x >= 1.0 for x in lengths) else math.fsum(1.0 / math.log(1.0 / x) for x in lengths)
        cert.measured["harmonic_sum"] = hsum
        cert.measured["harmonic_bound"] = float(8 * n * math.log(n) / Om) if Om > 0 else math.inf
        cert.checks["harmonic_sum_bound"] = hsum <= cert.measured["harmonic_bound"]
    return cert


def certify_metric_B(arcs, measure, n: int, Omega, ctx=None, refine: bool = True) -> Certificate:
    """Upper bound for ``e_n`` from short arcs carrying almost all the mass.

    Builds ``P = prod (z - z_l)^{m_l + 1}`` with ``z_l`` the arc centres and
    ``m_l = floor(Omega / log(1/|I_l|))`` and reports ``int |P|^2 d rho``
    together with the cruder ``max |P|^2 + 4^deg rho(T \\ E)``.

    ``int |P|^2 d rho`` alone can exceed ``4 e^{-Omega}`` when the residual
    mass is spread over the circle. With ``refine`` the same zeros (with
    multiplicity ``m_l + 1`` or 1) are completed by the best monic cofactor of
    degree ``n - deg``; every candidate is a monic polynomial of degree at most
    ``n``, so the smallest norm is still an upper bound for ``e_n^2``. The
    certificate asserts that bound is at most ``4 e^{-Omega}``.
    """
    from .measures import moments
    from .polynomials import vanishing_power_polynomial
    from .precision import resolve
    from .szego import CirclePolynomial, szego_en

    arcs = as_arcset(arcs)
    ctx = resolve(ctx)
    with ctx.workprec():
        Om = mpmath.mpf(Omega)
        lengths = [a.length for a in arcs]
        hsum = math.inf if any(x >= 1.0 for x in lengths) else math.fsum(1.0 / math.log(1.0 / x) for x in lengths)
        residual = measure.mass_outside(arcs, ctx) if len(arcs) else measure.mass_in(ArcSet.full(), ctx)
        hyp = {
            "harmonic_sum_le_n_over_2omega": hsum <= n / (2 * float(Om)),
            "residual_le_exp_minus_omega": residual <= mpmath.exp(-Om),
            "omega_ge_4n": Om >= 4 * n,
            "arc_count_le_n_over_2": 2 * len(arcs) <= n,
        }
        mults = [int(mpmath.floor(Om / mpmath.log(1 / mpmath.mpf(x)))) for x in lengths]
        degree = sum(m + 1 for m in mults)
        measured = {"harmonic_sum": hsum, "residual": residual, "multiplicities": mults, "degree": degree}
        cert = Certificate("metric_B", n, Om, hyp, {}, measured, arcs, None, ctx.mantissa_bits)
        cert.checks["degree_le_n"] = degree <= n
        if degree > n:
            return cert
        P = vanishing_power_polynomial([_mp_center(a) for a in arcs], mults, ctx=ctx)
        cert.polynomial = P
        # a true norm is nonnegative; a negative value is roundoff
        norm2 = abs(P.norm2(moments(measure, max(P.degree, 0), ctx=ctx)))
        cert.measured["norm2"] = norm2
        # the estimate displayed in the argument: max over the arcs plus 4^deg times the residual
        sup_arcs = mpmath.mpf(0)
        for a, m in zip(arcs, mults):
            sup_arcs = max(sup_arcs, mpmath.mpf(2) ** degree * mpmath.mpf(a.length) ** (m + 1))
        cert.measured["display_bound"] = sup_arcs ** 2 + mpmath.mpf(4) ** degree * residual
        best = norm2
        if refine and n > degree:
            # same forced zeros, best monic cofactor of the remaining degree
            for orders in ([m + 1 for m in mults], [1] * len(mults)):
                P0 = CirclePolynomial.from_unimodular_zeros([_mp_center(a) for a in arcs], orders, ctx)
                k = n - P0.degree
                base = moments(measure, k + P0.degree, ctx=ctx)
                mom = _weighted_moments(base, P0, k)
                c0 = mom.values[0].real
                # roundoff allowance of the weighted mass
                err = 64 * ctx.eps * base.total_mass * sum(abs(c) for c in P0.coeffs) ** 2
                if c0 <= err:
                    # P0 vanishes on the support up to roundoff; z^k P0 is a candidate
                    best = min(best, abs(c0) + err)
                    continue
                best = min(best, szego_en(mom, k, ctx).e_n_squared)
        cert.measured["certified_e_n_squared"] = best
        cert.measured["e_n_upper"] = mpmath.sqrt(best)
        cert.checks["e_n_le_2_exp_minus_omega_over_2"] = best <= 4 * mpmath.exp(-Om)
    return cert


def _weighted_moments(mom, P0, k: int):
    """Moments ``0..k`` of ``|P0|^2 d rho`` from those of ``rho``."""
    from .measures import MomentSequence

    q = P0.coeffs
    d = len(q) - 1
    lag = {}
    for l in range(-d, d + 1):
        acc = mpmath.mpc(0)
        for j in range(max(0, -l), min(d, d - l) + 1):
            acc += q[j + l] * q[j].conjugate()
        lag[l] = acc
    vals = []
    for m in range(k + 1):
        acc = mpmath.mpc(0)
        for l, a in lag.items():
            acc += a * mom[m - l]
        vals.append(acc)
    vals[0] = mpmath.mpc(vals[0].real)
    return MomentSequence(tuple(vals), mom.mantissa_bits)


def certify_capacity(measure, n: int, Omega=None, direction: str = "A", arcs=None, ctx=None,
                     verify_norm: bool = False) -> Certificate:
    """Capacity form of the super-exponential criterion.

    Direction ``"A"``: from ``e_n <= e^{-Omega}`` extract at most ``n`` arcs with
    capacity at most ``e^{-Omega/(2n)}`` that carry all but ``e^{-Omega}`` of
    the mass. Direction ``"B"``: from such arcs (capacity ``<= e^{-Omega/n}``,
    ``Omega >= C_1 n``) build the discretization polynomial of degree at most
    ``C n`` and certify ``e_{Cn}^2 <= max_E |P|^2 + max_T |P|^2 rho(T \\ E) <= e^{-Omega/2}``.
    """
    if direction == "A":
        ctx, res, Om, cert = _sublevel_certificate("capacity_A", measure, n, Omega, ctx)
        cert.hypotheses["n_ge_2"] = n >= 2
        if Om is None or "level" not in cert.measured:
            return cert
        arcs_found = cert.arcs
        cap = 0.0 if arcs_found.is_empty else capacity(arcs_found)
        with ctx.workprec():
            bound = float(mpmath.exp(-Om / (2 * n)))
        cert.measured["capacity"] = cap
        cert.measured["capacity_bound"] = bound
        cert.checks["capacity_bound"] = cap <= bound
        return cert
    if direction != "B":
        raise ValueError("direction must be 'A' or 'B'")
    if arcs is None:
        raise ValueError("direction B needs the arcs")
    if Omega is None:
        raise ValueError("direction B needs Omega")
    from .measures import moments
    from .precision import resolve

    arcs = as_arcset(arcs)
    ctx = resolve(ctx)
    C1, enlarged = omega_constant(n)
    cap = capacity(arcs)
    with ctx.workprec():
        Om = mpmath.mpf(Omega)
        residual = measure.mass_outside(arcs, ctx)
        hyp = {
            "arc_count_le_n": len(arcs) <= n,
            "capacity_le_exp_minus_omega_over_n": mpmath.log(cap) <= -Om / n,
            "residual_le_exp_minus_omega": residual <= mpmath.exp(-Om),
            "omega_ge_C1_n": Om >= C1 * n,
        }
        measured = {"capacity": cap, "residual": residual, "C1": C1, "enlarged_constants": enlarged}
        cert = Certificate("capacity_B", n, Om, hyp, {}, measured, arcs, None, ctx.mantissa_bits)
        if not all(hyp.values()):
            return cert
    disc = discretization_polynomial(arcs, n, strict=False, ctx=ctx)
    dc = disc.certificate
    with ctx.workprec():
        log_sup_E = mpmath.mpf(dc.max_log_abs_on_E)
        bound = mpmath.exp(2 * log_sup_E) + mpmath.mpf(4) ** dc.degree * residual
        cert.polynomial = disc.polynomial
        cert.measured.update({"N": dc.N, "degree": dc.degree, "C": dc.C, "log_sup_on_E": log_sup_E,
                              "e_Cn_squared_bound": bound, "discretization": dc.to_json()})
        cert.checks["discretization"] = dc.passed
        cert.checks["degree_le_C_n"] = dc.degree <= dc.C * n
        cert.checks["bound_le_exp_minus_omega_over_2"] = bound <= mpmath.exp(-Om / 2)
        if verify_norm:
            norm2 = disc.polynomial.norm2(moments(measure, dc.degree, ctx=ctx))
            cert.measured["norm2"] = norm2
            cert.checks["norm2_le_bound"] = norm2 <= bound * (1 + mpmath.mpf(2) ** (-ctx.mantissa_bits // 2))
    return cert
