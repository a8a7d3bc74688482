"""Numerical checks of the sign, monotonicity, spectral and degeneration
properties of conformal tetrahedra and of the curvature operator on a complex.

Every "if and only if" comparison uses a relative dead-band of ``R_TOL`` on
the hypothesis side (weights) and an absolute dead-band of ``C_TOL`` on the
conclusion side (angles, curvatures, derivatives).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .complex import MetricAssignment, SimplicialComplex
from .flow import assemble_laplacian, curvature_array, curvature_rhs, monotonicity_flags
from .geometry import (
    EDGE_INDEX,
    EPS_Q,
    DegenerateTetrahedronError,
    as_weights,
    dalpha_matrix,
    dbeta_dri,
    dihedral_and_solid_angles,
    face_geometry,
    omega_block,
    relative_q,
    solid_angles,
    volume,
)

__all__ = [
    "R_TOL",
    "C_TOL",
    "OperatorClassification",
    "MonotonicityReport",
    "SpectrumReport",
    "OmegaSignReport",
    "ScanReport",
    "ProbeReport",
    "classify_operator",
    "monotonicity_check",
    "jacobi_eigh",
    "hessian_spectrum",
    "minor_determinants",
    "minor_determinant_closed_form",
    "minor_determinant_check",
    "omega_sign_audit",
    "random_tetrahedra",
    "angle_monotonicity_scan",
    "degeneration_probe",
    "finite_difference_errors",
    "schlafli_residual",
    "embed_tetrahedron",
    "solid_angles_from_coordinates",
]

R_TOL = 1e-12
C_TOL = 1e-9


@dataclass(frozen=True)
class OperatorClassification:
    parabolic: bool
    negative_edges: list[tuple[int, int]]
    parabolic_like_for_K: bool
    K: np.ndarray = field(repr=False)
    dK_dt: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class MonotonicityReport:
    per_tetrahedron: np.ndarray
    holds: bool


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)
    null_vector_angle: float
    minor_check: float
    det_residual: float  # |det A| / spectral_radius^4

    @property
    def spectral_radius(self) -> float:
        return float(np.abs(self.eigenvalues).max())


@dataclass(frozen=True)
class OmegaSignReport:
    weights: np.ndarray
    omega: np.ndarray
    negative_pairs: list[tuple[int, int]]
    min_slots: list[int]
    larger_weight_violations: list[tuple[int, int]]
    minimum_slot_violations: list[tuple[int, int]]

    @property
    def ok(self) -> bool:
        return not self.larger_weight_violations and not self.minimum_slot_violations


@dataclass(frozen=True)
class ScanReport:
    samples: int
    seed: int
    violations: int
    face_area_violations: int
    equal_weight_max_gap: float
    witnesses: list[list[float]]


@dataclass(frozen=True)
class ProbeReport:
    start: np.ndarray
    direction: np.ndarray
    s_boundary: float
    boundary_weights: np.ndarray
    min_slot: int
    deltas: np.ndarray
    alphas: np.ndarray  # (len(deltas), 4)
    monotone: bool

    @property
    def alpha_sum(self) -> np.ndarray:
        return self.alphas.sum(axis=1)

    @property
    def final_min_alpha(self) -> float:
        return float(self.alphas[-1, self.min_slot])

    @property
    def final_other_alpha(self) -> float:
        others = [a for a in range(4) if a != self.min_slot]
        return float(self.alphas[-1, others].max())

    def converged(self, tol: float = 1e-3) -> bool:
        return self.final_min_alpha > 2 * math.pi - tol and self.final_other_alpha < tol


def _argextreme_sets(K):
    scale = max(float(np.abs(K).max()), 1.0)
    hi = np.flatnonzero(K >= K.max() - R_TOL * scale)
    lo = np.flatnonzero(K <= K.min() + R_TOL * scale)
    return hi, lo


def classify_operator(c: SimplicialComplex, m: MetricAssignment) -> OperatorClassification:
    """Sign pattern of the Laplacian weights and the max/min derivative test for K."""
    lap = assemble_laplacian(c, m)
    K, _ = curvature_array(c, m.array(c.vertices))
    dK = curvature_rhs(c, m, K)
    hi, lo = _argextreme_sets(K)
    like = bool(np.all(dK[hi] <= C_TOL) and np.all(dK[lo] >= -C_TOL))
    neg = lap.negative_edges()
    return OperatorClassification(not neg, neg, like, K, dK)


def monotonicity_check(c: SimplicialComplex, m: MetricAssignment) -> MonotonicityReport:
    r = m.array(c.vertices)
    K, _ = curvature_array(c, r)
    flags = monotonicity_flags(c, r, K, R_TOL, C_TOL)
    return MonotonicityReport(flags, bool(flags.all()))


def jacobi_eigh(A, tol: float = 1e-14, max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a small symmetric matrix by cyclic Jacobi rotations.

    Sweeps until the off-diagonal Frobenius norm is at most ``tol`` times the
    full norm.  Returns ascending eigenvalues and column eigenvectors.
    """
    A = np.array(A, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n) or not np.allclose(A, A.T, rtol=0, atol=1e-12 * max(np.abs(A).max(), 1e-300)):
        raise ValueError("jacobi_eigh needs a square symmetric matrix")
    A = 0.5 * (A + A.T)
    V = np.eye(n)
    norm = np.linalg.norm(A)
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(A - np.diag(np.diag(A))))
        if off <= tol * norm:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-18 * norm:
                    A[p, q] = A[q, p] = 0.0
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                cs = 1.0 / math.sqrt(t * t + 1.0)
                sn = t * cs
                ap, aq = A[:, p].copy(), A[:, q].copy()
                A[:, p], A[:, q] = cs * ap - sn * aq, sn * ap + cs * aq
                ap, aq = A[p, :].copy(), A[q, :].copy()
                A[p, :], A[q, :] = cs * ap - sn * aq, sn * ap + cs * aq
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p], V[:, q] = cs * vp - sn * vq, sn * vp + cs * vq
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    w = np.diag(A).copy()
    order = np.argsort(w)
    return w[order], V[:, order]


def minor_determinants(A) -> np.ndarray:
    """``out[i, j]`` = det of ``A`` with row i and column j removed."""
    A = np.asarray(A, dtype=float)
    n = A.shape[-1]
    out = np.empty(A.shape[:-2] + (n, n))
    for i in range(n):
        for j in range(n):
            out[..., i, j] = np.linalg.det(np.delete(np.delete(A, i, axis=-2), j, axis=-1))
    return out


def minor_determinant_closed_form(r) -> np.ndarray:
    """(-1)^(i+j+1) 288 V r_i r_j / (r_1 r_2 r_3 r_4 P_1 P_2 P_3 P_4) for every (i, j).

    For i != j the weight factor is 1 / (r_k r_l) with k, l the two
    remaining slots; at equal weights all factors reduce to 1 / r^2.
    """
    r = as_weights(r)
    P, _ = face_geometry(r)
    V = volume(r)
    base = 288.0 * V / (r.prod(-1) * P.prod(-1))
    sign = (-1.0) ** (np.add.outer(np.arange(4), np.arange(4)) + 1)
    return sign * base[..., None, None] * r[..., :, None] * r[..., None, :]


def minor_determinant_check(r):
    """Worst relative error between numeric 3x3 minors of d(alpha)/dr and the closed form.

    Broadcasts over leading axes (one value per tetrahedron).
    """
    A = dalpha_matrix(r)
    num = minor_determinants(A)
    exact = minor_determinant_closed_form(r)
    return np.max(np.abs(num - exact) / np.abs(exact), axis=(-2, -1))


def _angle_to(v, r):
    u = r / np.linalg.norm(r)
    v = v / np.linalg.norm(v)
    along = abs(float(v @ u))
    return math.atan2(float(np.linalg.norm(v - (v @ u) * u)), along)


def hessian_spectrum(r) -> SpectrumReport:
    """Spectrum of the symmetric matrix d(alpha_a)/d(r_b) of one tetrahedron."""
    r = as_weights(r)
    A = dalpha_matrix(r)
    w, V = jacobi_eigh(A)
    null = int(np.argmin(np.abs(w)))
    rho = float(np.abs(w).max())
    return SpectrumReport(
        eigenvalues=w,
        eigenvectors=V,
        null_vector_angle=_angle_to(V[:, null], r),
        minor_check=float(minor_determinant_check(r)),
        det_residual=abs(float(np.linalg.det(A))) / rho**4,
    )


def omega_sign_audit(r) -> OmegaSignReport:
    """Signs of all Omega_ab and the two necessary conditions on negative ones.

    * a negative Omega_ab forces r_a and r_b above min(r_c, r_d);
    * for any minimal-weight slot i, Omega_ib >= 0 and Omega_bi >= 0.
    """
    r = as_weights(r)
    omega = omega_block(r).omega
    scale = float(np.abs(omega).max())
    rmin = float(r.min())
    neg, larger, at_min = [], [], []
    for a in range(4):
        for b in range(4):
            if a == b:
                continue
            if omega[a, b] < 0:
                neg.append((a, b))
                c, d = (x for x in range(4) if x not in (a, b))
                floor = min(r[c], r[d])
                if omega[a, b] < -R_TOL * scale and not (r[a] > floor and r[b] > floor):
                    larger.append((a, b))
    mins = [a for a in range(4) if r[a] <= rmin * (1 + R_TOL)]
    for i in mins:
        for b in range(4):
            if b == i:
                continue
            if omega[i, b] < -R_TOL * scale:
                at_min.append((i, b))
            if omega[b, i] < -R_TOL * scale:
                at_min.append((b, i))
    return OmegaSignReport(r, omega, neg, mins, larger, sorted(set(at_min)))


def random_tetrahedra(n: int, seed: int = 0, low: float = 0.1, high: float = 10.0) -> np.ndarray:
    """``n`` nondegenerate weight vectors, log-uniform on [low, high], rejection sampled on Q."""
    rng = np.random.default_rng(seed)
    out = []
    have = 0
    while have < n:
        batch = np.exp(rng.uniform(math.log(low), math.log(high), size=(2 * (n - have) + 8, 4)))
        batch = batch[relative_q(batch) > EPS_Q]
        out.append(batch)
        have += len(batch)
    return np.concatenate(out)[:n]


def _pairwise_monotone(r, alpha):
    """Boolean per sample: r_a <= r_b iff alpha_a >= alpha_b for every pair."""
    ok = np.ones(len(r), dtype=bool)
    gap = 0.0
    scale = r.max(axis=1)
    for a in range(4):
        for b in range(a + 1, 4):
            dr = r[:, a] - r[:, b]
            da = alpha[:, a] - alpha[:, b]
            tied = np.abs(dr) <= R_TOL * scale
            if tied.any():
                gap = max(gap, float(np.abs(da[tied]).max()))
            ok &= np.where(tied, np.abs(da) <= C_TOL, -np.sign(dr) * da >= -C_TOL)
    return ok, gap


def angle_monotonicity_scan(samples: int, seed: int = 0, weights=None) -> ScanReport:
    """Count samples where weight order and solid-angle order disagree,
    and where the largest face is not opposite the largest solid angle."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    r = random_tetrahedra(samples, seed) if weights is None else as_weights(weights).reshape(-1, 4)
    alpha = solid_angles(r)
    ok, gap = _pairwise_monotone(r, alpha)
    _, A = face_geometry(r)
    face_ok = np.argmax(A, axis=1) == np.argmax(alpha, axis=1)
    bad = np.flatnonzero(~ok | ~face_ok)
    return ScanReport(
        samples=len(r),
        seed=seed,
        violations=int((~ok).sum()),
        face_area_violations=int((~face_ok).sum()),
        equal_weight_max_gap=gap,
        witnesses=r[bad[:10]].tolist(),
    )


DEFAULT_DELTAS = 10.0 ** -np.arange(2, 11)


def degeneration_probe(r0, direction, deltas=DEFAULT_DELTAS) -> ProbeReport:
    """Follow r0 + s * direction to the first s where Q = 0 and sample the
    solid angles where the relative Q equals each of ``deltas``.

    Raises ``ValueError`` if the path never degenerates or a weight reaches
    zero first.
    """
    r0 = as_weights(r0)
    d = np.asarray(direction, dtype=float)
    if d.shape != (4,) or not np.any(d):
        raise ValueError("direction must be a nonzero 4-vector")
    if not relative_q(r0) > max(deltas):
        raise ValueError("starting tetrahedron is already (nearly) degenerate")

    neg = d < 0
    s_zero = float(np.min(-r0[neg] / d[neg])) if neg.any() else math.inf

    def rq(s):
        return float(relative_q(r0 + s * d))

    # bracket the first sign change of Q
    step = 1e-3 * float(r0.max()) / float(np.abs(d).max())
    s_lo, s_hi = 0.0, None
    s = step
    s_cap = min(s_zero, 1e8 * step)
    while s < s_cap:
        if rq(s) <= 0.0:
            s_hi = s
            break
        s_lo = s
        s *= 1.5
    if s_hi is None:
        if math.isfinite(s_zero):
            raise ValueError("a weight collapses to 0 before the tetrahedron degenerates")
        raise ValueError("the path never degenerates")
    s_star = brentq(rq, s_lo, s_hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    # step back to the nondegenerate side of the root
    while rq(s_star) <= 0.0:
        s_star = np.nextafter(s_star, 0.0)
    boundary = r0 + s_star * d
    if boundary.min() <= 1e-9 * boundary.max():
        raise ValueError("weights collapse to 0 along the path")

    deltas = np.asarray(deltas, dtype=float)
    alphas = []
    for delta in deltas:
        s = brentq(lambda x: rq(x) - delta, 0.0, s_star, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
        alphas.append(solid_angles(r0 + s * d))
    alphas = np.array(alphas)
    min_slot = int(np.argmin(boundary))
    others = [a for a in range(4) if a != min_slot]
    monotone = bool(
        np.all(np.diff(alphas[:, min_slot]) >= -C_TOL) and np.all(np.diff(alphas[:, others], axis=0) <= C_TOL)
    )
    return ProbeReport(r0, d, s_star, boundary, min_slot, deltas, alphas, monotone)


def _central_difference(f, r, b, h):
    step = np.zeros_like(r)
    step[..., b] = h * r[..., b]
    return (f(r + step) - f(r - step)) / (2.0 * h * r[..., b])[..., None]


def finite_difference_errors(r, h: float = 1e-6) -> dict[str, np.ndarray]:
    """Analytic angle derivatives against central differences, per tetrahedron.

    Errors are measured on the dimensionless derivatives r_b d(angle)/d(r_b)
    and divided by the largest such entry of the same block, so entries that
    are tiny only because of the weight scale do not dominate.
    """
    r = as_weights(r).reshape(-1, 4)
    D = dalpha_matrix(r) * r[:, None, :]
    F = np.stack([_central_difference(solid_angles, r, b, h) for b in range(4)], axis=-1) * r[:, None, :]
    scale = np.abs(D).max(axis=(1, 2))
    err = np.abs(D - F) / scale[:, None, None]
    eye = np.eye(4, dtype=bool)

    def dihedral(x):
        return dihedral_and_solid_angles(x)[0]

    dB = np.stack([_central_difference(dihedral, r, i, h) for i in range(4)], axis=1)  # (n, slot, edge)
    pairs = [(i, j) for i in range(4) for j in range(4) if i != j]
    ana = np.stack([dbeta_dri(r, i, j) * r[:, i] for i, j in pairs], axis=1)
    num = np.stack([dB[:, i, EDGE_INDEX[(i, j)]] * r[:, i] for i, j in pairs], axis=1)
    berr = np.abs(ana - num) / np.abs(ana).max(axis=1, keepdims=True)
    return {
        "dalpha_dri": err[:, eye].max(axis=1),
        "dalpha_drj": err[:, ~eye].max(axis=1),
        "dbeta_dri": berr.max(axis=1),
    }


def schlafli_residual(r) -> np.ndarray:
    """max_a |sum_b d(alpha_a)/d(r_b) r_b| relative to sum_b |d(alpha_a)/d(r_b) r_b|."""
    r = as_weights(r)
    terms = dalpha_matrix(r) * r[..., None, :]
    return (np.abs(terms.sum(-1)) / np.abs(terms).sum(-1)).max(-1)


def embed_tetrahedron(r) -> np.ndarray:
    """Vertex coordinates (4, 3) realizing edge lengths r_a + r_b."""
    r = as_weights(r)
    if not relative_q(r) > EPS_Q:
        raise DegenerateTetrahedronError(f"degenerate tetrahedron at weights {r.tolist()}")
    d = r[:, None] + r[None, :]
    p = np.zeros((4, 3))
    p[1, 0] = d[0, 1]
    x2 = (d[0, 1] ** 2 + d[0, 2] ** 2 - d[1, 2] ** 2) / (2 * d[0, 1])
    p[2, :2] = x2, math.sqrt(d[0, 2] ** 2 - x2**2)
    x3 = (d[0, 1] ** 2 + d[0, 3] ** 2 - d[1, 3] ** 2) / (2 * d[0, 1])
    y3 = (d[0, 3] ** 2 + d[0, 2] ** 2 - d[2, 3] ** 2 - 2 * x3 * p[2, 0]) / (2 * p[2, 1])
    p[3] = x3, y3, math.sqrt(max(d[0, 3] ** 2 - x3**2 - y3**2, 0.0))
    return p


def solid_angles_from_coordinates(r) -> np.ndarray:
    """Solid angles from an explicit embedding (Van Oosterom-Strackee formula)."""
    p = embed_tetrahedron(r)
    out = np.empty(4)
    for a in range(4):
        u, v, w = (p[b] - p[a] for b in range(4) if b != a)
        lu, lv, lw = np.linalg.norm(u), np.linalg.norm(v), np.linalg.norm(w)
        triple = abs(float(np.dot(u, np.cross(v, w))))
        denom = lu * lv * lw + np.dot(u, v) * lw + np.dot(u, w) * lv + np.dot(v, w) * lu
        out[a] = 2.0 * math.atan2(triple, denom)
    return out
