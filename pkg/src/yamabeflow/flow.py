"""Curvature, the induced graph Laplacian, and the combinatorial Yamabe flow.

The flow is dr_i/dt = -K_i r_i with K_i = 4 pi minus the solid angles at i.
Per-vertex arrays are aligned with ``SimplicialComplex.vertices``.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .complex import MetricAssignment, SimplicialComplex
from .geometry import (
    DegenerateTetrahedronError,
    _alpha_from_beta,
    _beta_unchecked,
    _cayley_menger_volume,
    _normalized,
    omega_block,
    q_gradient,
    relative_q,
    EPS_Q,
)

__all__ = [
    "CurvatureState",
    "LaplacianCoefficients",
    "FlowConfig",
    "FlowSample",
    "FlowTrace",
    "curvature",
    "curvature_array",
    "assemble_laplacian",
    "curvature_rhs",
    "q_rate",
    "monotonicity_flags",
    "run_flow",
]

log = logging.getLogger(__name__)

FOUR_PI = 4.0 * math.pi


@dataclass(frozen=True)
class CurvatureState:
    vertices: tuple[int, ...]
    K: np.ndarray
    alpha_by_tet: np.ndarray  # (T, 4), slot order of each tetrahedron

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.vertices, self.K.tolist()))

    @property
    def spread(self) -> float:
        return float(self.K.max() - self.K.min())


@dataclass(frozen=True)
class LaplacianCoefficients:
    """Weights of (Lap f)_i = sum_j a_ij (f_j - f_i).

    ``matrix[i, j]`` holds a_ij by vertex position (zero diagonal, zero off
    the 1-skeleton) and ``weights`` the r_i in the same order.  The operator
    is self-adjoint for the inner product weighted by r, i.e.
    r_i a_ij = r_j a_ji.  Coefficients may be negative.
    """

    vertices: tuple[int, ...]
    matrix: np.ndarray
    weights: np.ndarray
    edges: tuple[tuple[int, int], ...]

    @property
    def b_metric(self) -> dict[int, float]:
        """Vertex id -> r_i."""
        return dict(zip(self.vertices, self.weights.tolist()))

    @property
    def a(self) -> dict[tuple[int, int], float]:
        idx = {v: n for n, v in enumerate(self.vertices)}
        out = {}
        for i, j in self.edges:
            out[(i, j)] = float(self.matrix[idx[i], idx[j]])
            out[(j, i)] = float(self.matrix[idx[j], idx[i]])
        return out

    def apply(self, f) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        return self.matrix @ f - self.matrix.sum(axis=1) * f

    def negative_edges(self) -> list[tuple[int, int]]:
        return [e for e, x in self.a.items() if x < 0]


def _tet_weights(c: SimplicialComplex, r: np.ndarray) -> np.ndarray:
    return r[c.tet_array]


def _check_tets(c: SimplicialComplex, rt: np.ndarray, eps: float = EPS_Q):
    rq = relative_q(rt)
    bad = np.flatnonzero(~(rq > eps))
    if bad.size:
        n = int(bad[0])
        raise DegenerateTetrahedronError(
            f"tetrahedron {n} {c.tetrahedra[n]} is degenerate (relative Q = {rq[n]:.3g})"
        )
    return rq


def _alpha_tets(rt: np.ndarray) -> np.ndarray:
    rn, _ = _normalized(rt)
    return _alpha_from_beta(_beta_unchecked(rn, _cayley_menger_volume(rn)))


def curvature_array(c: SimplicialComplex, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """K per vertex and alpha per (tetrahedron, slot) for a weight array aligned with vertices."""
    rt = _tet_weights(c, r)
    _check_tets(c, rt)
    alpha = _alpha_tets(rt)
    K = np.full(len(c.vertices), FOUR_PI)
    np.subtract.at(K, c.tet_array, alpha)
    return K, alpha


def curvature(c: SimplicialComplex, m: MetricAssignment) -> CurvatureState:
    K, alpha = curvature_array(c, m.array(c.vertices))
    return CurvatureState(c.vertices, K, alpha)


def _omega_tets(c, r):
    rt = _tet_weights(c, r)
    _check_tets(c, rt)
    return omega_block(rt).omega


def assemble_laplacian(c: SimplicialComplex, m: MetricAssignment) -> LaplacianCoefficients:
    """a_ij = sum over tetrahedra containing {i, j} of Omega (row i, column j)."""
    r = m.array(c.vertices)
    W = _laplacian_matrix(c, _omega_tets(c, r))
    return LaplacianCoefficients(c.vertices, W, r, c.edges)


def _rhs_from_omega(c, omega, K):
    Kt = K[c.tet_array]
    contrib = np.einsum("tab,tab->ta", omega, Kt[:, None, :] - Kt[:, :, None])
    out = np.zeros(len(c.vertices))
    np.add.at(out, c.tet_array, contrib)
    return out


def curvature_rhs(c: SimplicialComplex, m: MetricAssignment, K=None) -> np.ndarray:
    """dK/dt as the per-tetrahedron Omega-weighted sum of curvature differences.

    ``K`` defaults to the curvature of ``m``; passing another array evaluates
    the same operator on it.
    """
    r = m.array(c.vertices)
    omega = _omega_tets(c, r)
    if K is None:
        K, _ = curvature_array(c, r)
    return _rhs_from_omega(c, omega, np.asarray(K, dtype=float))


def q_rate(r, K) -> np.ndarray:
    """dQ/dt of one tetrahedron under the flow, -sum_a (dQ/dr_a) K_a r_a."""
    r = np.asarray(r, dtype=float)
    return -(q_gradient(r) * np.asarray(K, dtype=float) * r).sum(-1)


def monotonicity_flags(
    c: SimplicialComplex, r: np.ndarray, K: np.ndarray, r_tol: float = 1e-12, k_tol: float = 1e-9
) -> np.ndarray:
    """Per tetrahedron: does r_i <= r_j iff K_i <= K_j hold for all six pairs?

    Weights within ``r_tol`` (relative to the tetrahedron's largest) count as
    equal and then require |K_i - K_j| <= k_tol; otherwise the curvature
    difference must have the sign of the weight difference, up to ``k_tol``.
    """
    tets = c.tet_array
    rt, Kt = r[tets], K[tets]
    ok = np.ones(len(tets), dtype=bool)
    scale = rt.max(axis=1)
    for a in range(4):
        for b in range(a + 1, 4):
            dr = rt[:, a] - rt[:, b]
            dK = Kt[:, a] - Kt[:, b]
            tied = np.abs(dr) <= r_tol * scale
            ok &= np.where(tied, np.abs(dK) <= k_tol, np.sign(dr) * dK >= -k_tol)
    return ok


@dataclass(frozen=True)
class FlowConfig:
    t_end: float = 10.0
    dt_init: float = 1e-3
    dt_min: float = 1e-10
    rel_tol: float = 1e-8
    q_guard: float = 1e-10
    record_every: int = 1

    def __post_init__(self):
        if not (self.t_end > 0):
            raise ValueError("t_end must be positive")
        if not (0 < self.dt_min <= self.dt_init):
            raise ValueError("need 0 < dt_min <= dt_init")
        if not (self.rel_tol > 0):
            raise ValueError("rel_tol must be positive")
        if not (self.q_guard >= 0):
            raise ValueError("q_guard must be non-negative")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")


@dataclass(frozen=True)
class FlowSample:
    t: float
    r: np.ndarray
    K: np.ndarray
    min_q: float  # smallest Q / (sum 1/r)^2 over tetrahedra
    parabolic: bool  # every assembled a_ij >= 0
    mc: bool  # monotonicity condition in every tetrahedron


Termination = Literal["reached_t_end", "degeneracy_stop", "step_underflow"]


@dataclass
class FlowTrace:
    vertices: tuple[int, ...]
    samples: list[FlowSample] = field(default_factory=list)
    termination: Termination = "reached_t_end"
    accepted_steps: int = 0
    rejected_steps: int = 0

    @property
    def t(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def r(self) -> np.ndarray:
        return np.array([s.r for s in self.samples])

    @property
    def K(self) -> np.ndarray:
        return np.array([s.K for s in self.samples])

    @property
    def spread(self) -> np.ndarray:
        K = self.K
        return K.max(axis=1) - K.min(axis=1)

    def final(self) -> FlowSample:
        return self.samples[-1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "vertex", "r", "K"])
        for s in self.samples:
            for v, ri, Ki in zip(self.vertices, s.r, s.K):
                w.writerow([_num(s.t), v, _num(ri), _num(Ki)])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "vertices": list(self.vertices),
            "termination": self.termination,
            "accepted_steps": self.accepted_steps,
            "rejected_steps": self.rejected_steps,
            "samples": [
                {
                    "t": s.t,
                    "r": s.r.tolist(),
                    "K": s.K.tolist(),
                    "min_q": s.min_q,
                    "parabolic": s.parabolic,
                    "mc": s.mc,
                }
                for s in self.samples
            ],
        }
        return _dump_json(doc)


def _num(x: float) -> str:
    return format(float(x), ".17g")


def _dump_json(doc, indent: str = "") -> str:
    """JSON text with every float written at 17 significant digits."""
    inner = indent + " "
    if isinstance(doc, dict):
        if not doc:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_dump_json(v, inner)}" for k, v in doc.items()]
        return "{\n" + ",\n".join(items) + "\n" + indent + "}"
    if isinstance(doc, (list, tuple)):
        if all(not isinstance(v, (dict, list, tuple)) for v in doc):
            return "[" + ", ".join(_dump_json(v) for v in doc) + "]"
        return "[\n" + ",\n".join(inner + _dump_json(v, inner) for v in doc) + "\n" + indent + "]"
    if isinstance(doc, (bool, np.bool_)) or doc is None:
        return json.dumps(None if doc is None else bool(doc))
    if isinstance(doc, (int, np.integer)):
        return str(int(doc))
    if isinstance(doc, (float, np.floating)):
        return _num(doc) if math.isfinite(doc) else "null"
    return json.dumps(doc)


def _laplacian_matrix(c: SimplicialComplex, omega: np.ndarray) -> np.ndarray:
    tets = c.tet_array
    n = len(c.vertices)
    W = np.zeros((n, n))
    rows = np.repeat(tets[:, :, None], 4, axis=2)
    cols = np.repeat(tets[:, None, :], 4, axis=1)
    np.add.at(W, (rows, cols), omega)
    np.fill_diagonal(W, 0.0)
    return W


def _sample(c, t, r) -> FlowSample:
    rt = _tet_weights(c, r)
    rq = _check_tets(c, rt, eps=0.0)
    K, _ = curvature_array(c, r)
    W = _laplacian_matrix(c, omega_block(rt).omega)
    mc = bool(np.all(monotonicity_flags(c, r, K)))
    return FlowSample(float(t), r, K, float(rq.min()), bool(np.all(W >= 0)), mc)


class _Degenerate(Exception):
    pass


def run_flow(c: SimplicialComplex, m0: MetricAssignment, cfg: FlowConfig | None = None) -> FlowTrace:
    """Integrate dr_i/dt = -K_i r_i from ``m0`` up to ``cfg.t_end``.

    The state is advanced in log-weights u = log r (so du_i/dt = -K_i) with
    classical RK4 and step doubling; the local error max_i |du_i| is the
    relative error in r.  Any step whose stages or result would bring some
    tetrahedron's relative Q below ``cfg.q_guard`` is rejected and dt halved.
    """
    cfg = cfg or FlowConfig()
    tets = c.tet_array
    r0 = m0.array(c.vertices)
    rt0 = r0[tets]
    if not np.all(relative_q(rt0) > max(cfg.q_guard, EPS_Q)):
        raise DegenerateTetrahedronError("initial metric is degenerate or below the Q guard")

    guard = max(cfg.q_guard, EPS_Q)

    def rhs(u):
        rt = np.exp(u)[tets]
        if not np.all(relative_q(rt) > guard):
            raise _Degenerate
        alpha = _alpha_tets(rt)
        K = np.full(len(u), FOUR_PI)
        np.subtract.at(K, tets, alpha)
        return -K

    def rk4(u, h, k1=None):
        k1 = rhs(u) if k1 is None else k1
        k2 = rhs(u + 0.5 * h * k1)
        k3 = rhs(u + 0.5 * h * k2)
        k4 = rhs(u + h * k3)
        return u + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    trace = FlowTrace(c.vertices)
    u = np.log(r0)
    t = 0.0
    dt = min(cfg.dt_init, cfg.t_end)
    trace.samples.append(_sample(c, t, r0))
    since_record = 0
    while t < cfg.t_end:
        h = min(dt, cfg.t_end - t)
        try:
            k1 = rhs(u)
            full = rk4(u, h, k1)
            half = rk4(rk4(u, 0.5 * h, k1), 0.5 * h)
            rhs(half)  # guard the endpoint too
        except _Degenerate:
            trace.rejected_steps += 1
            dt = 0.5 * h
            if dt < cfg.dt_min:
                trace.termination = "degeneracy_stop"
                break
            continue
        err = float(np.max(np.abs(half - full))) / 15.0
        if err > cfg.rel_tol:
            trace.rejected_steps += 1
            dt = h * max(0.2, 0.9 * (cfg.rel_tol / err) ** 0.2)
            if dt < cfg.dt_min:
                trace.termination = "step_underflow"
                break
            continue
        u = half
        t = cfg.t_end if cfg.t_end - (t + h) <= 1e-14 * cfg.t_end else t + h
        trace.accepted_steps += 1
        since_record += 1
        if h == dt:
            dt = h * (5.0 if err == 0.0 else min(5.0, 0.9 * (cfg.rel_tol / err) ** 0.2))
        if since_record >= cfg.record_every or t >= cfg.t_end:
            trace.samples.append(_sample(c, t, np.exp(u)))
            since_record = 0
    if trace.termination != "reached_t_end" and since_record:
        trace.samples.append(_sample(c, t, np.exp(u)))
    log.debug(
        "flow finished at t=%g (%s), %d accepted, %d rejected",
        t, trace.termination, trace.accepted_steps, trace.rejected_steps,
    )
    return trace
