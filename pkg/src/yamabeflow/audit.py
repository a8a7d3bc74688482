"""The ``check`` suite: every numerical claim, evaluated and collected into a
JSON-ready report with worst-case witnesses."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import analysis as an
from .complex import MetricAssignment, SimplicialComplex
from .geometry import (
    as_weights,
    dalpha_matrix,
    dbeta_dri,
    nondegeneracy_q,
    omega_block,
    relative_q,
    solid_angles,
    volume,
    volume_sine_formula,
)

__all__ = ["Claim", "audit_tetrahedra", "audit_scan", "audit_probe", "audit_complex", "run_check"]

PROBE_START = (1.0, 1.0, 1.0, 0.3)
PROBE_DIRECTION = (0.0, 0.0, 0.0, -1.0)


@dataclass
class Claim:
    name: str
    passed: bool
    worst: float | None = None
    tolerance: float | None = None
    witness: list | None = None
    detail: dict = field(default_factory=dict)


def _worst(name, values, tol, R, *, upper=True):
    """Claim that every entry of ``values`` is <= tol (or >= tol when upper is False)."""
    values = np.asarray(values, dtype=float)
    k = int(np.argmax(values) if upper else np.argmin(values))
    worst = float(values[k])
    ok = bool(np.all(values <= tol) if upper else np.all(values >= tol))
    return Claim(name, ok, worst, tol, np.asarray(R[k]).tolist())


def audit_tetrahedra(R) -> list[Claim]:
    """Per-tetrahedron claims over a batch of weight vectors."""
    R = as_weights(R).reshape(-1, 4)
    claims = []

    fd = an.finite_difference_errors(R)
    for key in ("dalpha_dri", "dalpha_drj", "dbeta_dri"):
        claims.append(_worst(f"finite_difference_{key}", fd[key], 1e-6, R))

    D = dalpha_matrix(R)
    claims.append(_worst("schlafli_row_identity", an.schlafli_residual(R), 1e-12, R))
    asym = np.abs(D - np.swapaxes(D, 1, 2)).max(axis=(1, 2)) / np.abs(D).max(axis=(1, 2))
    claims.append(_worst("jacobian_symmetry", asym, 1e-12, R))
    diag = np.diagonal(D, axis1=1, axis2=2).max(axis=1)
    claims.append(_worst("self_derivative_negative", diag, 0.0, R))

    alpha = solid_angles(R)
    direct = np.array([an.solid_angles_from_coordinates(r) for r in R])
    claims.append(_worst("girard_consistency", np.abs(alpha - direct).max(axis=1), 1e-10, R))
    claims.append(_worst("solid_angle_sum_below_2pi", alpha.sum(axis=1) - 2 * math.pi, 1e-12, R))
    V = volume(R)
    vs = volume_sine_formula(R)
    claims.append(_worst("volume_sine_identity", (np.abs(vs - V[:, None]) / V[:, None]).max(axis=1), 1e-9, R))

    # derivative of a dihedral angle w.r.t. the minimal weight at one of its ends
    imin = np.argmin(R, axis=1)
    worst_db = np.full(len(R), -np.inf)
    for i in range(4):
        sel = imin == i
        if sel.any():
            for j in range(4):
                if j != i:
                    worst_db[sel] = np.maximum(worst_db[sel], dbeta_dri(R[sel], i, j))
    claims.append(_worst("dihedral_derivative_at_minimum_negative", worst_db, 0.0, R))

    spectra = [an.hessian_spectrum(r) for r in R]
    rho = np.array([s.spectral_radius for s in spectra])
    top = np.array([s.eigenvalues[-1] for s in spectra]) / rho
    third = np.array([s.eigenvalues[-2] for s in spectra]) / rho
    claims.append(_worst("negative_semidefinite", top, 1e-9, R))
    claims.append(_worst("rank_three", third, -1e-12, R))
    claims.append(_worst("null_vector_is_weights", [s.null_vector_angle for s in spectra], 1e-7, R))
    claims.append(_worst("minor_determinants", an.minor_determinant_check(R), 1e-8, R))
    claims.append(_worst("jacobian_singular", [s.det_residual for s in spectra], 1e-12, R))

    larger = np.zeros(len(R), dtype=int)
    at_min = np.zeros(len(R), dtype=int)
    negatives = 0
    for n, r in enumerate(R):
        rep = an.omega_sign_audit(r)
        larger[n] = len(rep.larger_weight_violations)
        at_min[n] = len(rep.minimum_slot_violations)
        negatives += len(rep.negative_pairs)
    sign_claim = _worst("negative_omega_needs_larger_weights", larger, 0, R)
    sign_claim.detail["negative_omega_count"] = negatives
    claims.append(sign_claim)
    claims.append(_worst("omega_nonnegative_at_minimum", at_min, 0, R))
    return claims


def audit_scan(samples: int, seed: int) -> list[Claim]:
    rep = an.angle_monotonicity_scan(samples, seed)
    common = {"samples": rep.samples, "seed": rep.seed}
    return [
        Claim("angle_monotonicity", rep.violations == 0, rep.violations, 0,
              rep.witnesses[0] if rep.violations else None, dict(common)),
        Claim("largest_face_opposite_largest_angle", rep.face_area_violations == 0,
              rep.face_area_violations, 0, None, dict(common)),
    ]


def audit_probe(start=PROBE_START, direction=PROBE_DIRECTION, tol: float = 1e-3) -> list[Claim]:
    rep = an.degeneration_probe(start, direction)
    detail = {
        "boundary_weights": rep.boundary_weights.tolist(),
        "min_slot": rep.min_slot,
        "deltas": rep.deltas.tolist(),
        "final_alpha": rep.alphas[-1].tolist(),
        "final_alpha_sum": float(rep.alpha_sum[-1]),
        "monotone": rep.monotone,
    }
    return [
        Claim("degeneration_limit", rep.converged(tol) and rep.monotone,
              max(2 * math.pi - rep.final_min_alpha, rep.final_other_alpha), tol, list(start), detail)
    ]


def audit_complex(c: SimplicialComplex, m: MetricAssignment) -> tuple[list[Claim], dict]:
    """Claims that must hold on any complex, plus observations about this one."""
    cls = an.classify_operator(c, m)
    mono = an.monotonicity_check(c, m)
    claims = [
        Claim("parabolic_implies_parabolic_like", (not cls.parabolic) or cls.parabolic_like_for_K),
        Claim("monotone_implies_parabolic_like", (not mono.holds) or cls.parabolic_like_for_K),
    ]
    r = m.array(c.vertices)
    claims += audit_tetrahedra(r[c.tet_array])
    obs = {
        "vertices": list(c.vertices),
        "K": cls.K.tolist(),
        "dK_dt": cls.dK_dt.tolist(),
        "parabolic": cls.parabolic,
        "negative_edges": [list(e) for e in cls.negative_edges],
        "parabolic_like_for_K": cls.parabolic_like_for_K,
        "monotonicity_condition": mono.holds,
    }
    return claims, obs


def _tetra_observations(r) -> dict:
    r = as_weights(r)
    omega = omega_block(r).omega
    sp = an.hessian_spectrum(r)
    neg = [[a, b] for a in range(4) for b in range(4) if a != b and omega[a, b] < 0]
    return {
        "weights": r.tolist(),
        "Q": float(nondegeneracy_q(r)),
        "relative_Q": float(relative_q(r)),
        "omega": omega.tolist(),
        "negative_omega": neg,
        "parabolic": not neg,
        "eigenvalues": sp.eigenvalues.tolist(),
        "null_vector_angle": sp.null_vector_angle,
    }


def run_check(samples: int = 1000, seed: int = 0, tetra=None, complex_=None) -> dict:
    """Run the suite and return the report.

    With ``tetra`` the per-tetrahedron claims run on that tetrahedron; with
    ``complex_ = (c, m)`` they run on every tetrahedron of the complex plus
    the operator claims.  The random-sample claims always run.
    """
    claims: list[Claim] = []
    obs: dict = {}

    def add(scope, items):
        for c in items:
            c.name = f"{scope}.{c.name}"
            claims.append(c)

    if tetra is not None:
        add("tetra", audit_tetrahedra(np.atleast_2d(tetra)))
        obs["tetra"] = _tetra_observations(tetra)
    if complex_ is not None:
        cc, oo = audit_complex(*complex_)
        add("complex", cc)
        obs["complex"] = oo
    add("random", audit_tetrahedra(an.random_tetrahedra(samples, seed)))
    add("random", audit_scan(samples, seed))
    add("probe", audit_probe())
    return {
        "seed": seed,
        "samples": samples,
        "passed": all(c.passed for c in claims),
        "failed": [c.name for c in claims if not c.passed],
        "claims": [asdict(c) for c in claims],
        "observations": obs,
    }
