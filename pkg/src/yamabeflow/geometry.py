"""Closed-form geometry of a conformal tetrahedron.

A conformal tetrahedron is given by four positive weights ``r`` (one per
vertex slot 0..3); the edge between slots a and b has length r_a + r_b.
Every function here accepts an array of shape ``(..., 4)`` and broadcasts
over the leading axes, so a whole complex can be evaluated in one call.

Dihedral angles are indexed by edge in the order of :data:`EDGES`.  Face f
is the face opposite slot f.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "EDGES",
    "EPS_Q",
    "DegenerateTetrahedronError",
    "TetraScalars",
    "JacobianBlock",
    "as_weights",
    "nondegeneracy_q",
    "relative_q",
    "is_nondegenerate",
    "q_gradient",
    "face_geometry",
    "volume",
    "volume_sine_formula",
    "dihedral_and_solid_angles",
    "solid_angles",
    "tetra_scalars",
    "dalpha_dri",
    "dalpha_drj",
    "dalpha_matrix",
    "omega_block",
    "dbeta_dri",
]

EDGES = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
EDGE_INDEX = {e: n for n, e in enumerate(EDGES)}
EDGE_INDEX.update({(j, i): n for (i, j), n in EDGE_INDEX.items()})

# tetrahedron counts as degenerate when Q <= EPS_Q * (sum 1/r)^2
EPS_Q = 1e-12

_OTHERS = tuple(tuple(s for s in range(4) if s != a) for a in range(4))


class DegenerateTetrahedronError(ValueError):
    """Raised when a quantity needs Q > 0 but the weights violate it."""


@dataclass(frozen=True)
class TetraScalars:
    Q: np.ndarray
    P: np.ndarray  # (..., 4) perimeter of the face opposite each slot
    A: np.ndarray  # (..., 4) area of the face opposite each slot
    V: np.ndarray
    beta: np.ndarray  # (..., 6) by EDGES
    alpha: np.ndarray  # (..., 4)


@dataclass(frozen=True)
class JacobianBlock:
    """``dalpha[..., a, b]`` is d(alpha_a)/d(r_b); ``omega[..., a, b]`` is that times r_b off the diagonal."""

    dalpha: np.ndarray
    omega: np.ndarray


def as_weights(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if r.shape[-1:] != (4,):
        raise ValueError(f"expected weights of shape (..., 4), got {r.shape}")
    if not np.all(r > 0) or not np.all(np.isfinite(r)):
        raise ValueError(f"weights must be positive and finite, got {r.tolist()}")
    return r


def _normalized(r):
    # every formula is homogeneous in r; work at unit scale to keep r^6 products in range
    s = r.max(axis=-1, keepdims=True)
    return r / s, s[..., 0]


def nondegeneracy_q(r) -> np.ndarray:
    """(sum 1/r)^2 - 2 sum 1/r^2; positive iff the tetrahedron is nondegenerate."""
    inv = 1.0 / as_weights(r)
    return inv.sum(-1) ** 2 - 2.0 * (inv**2).sum(-1)


def relative_q(r) -> np.ndarray:
    """Q divided by (sum 1/r)^2: scale free, at most 1/2 (equal weights)."""
    r = as_weights(r)
    rn, _ = _normalized(r)
    inv = 1.0 / rn
    s = inv.sum(-1)
    return (s**2 - 2.0 * (inv**2).sum(-1)) / s**2


def is_nondegenerate(r, eps: float = EPS_Q) -> np.ndarray:
    return relative_q(r) > eps


def _require_nondegenerate(r):
    rq = np.atleast_1d(relative_q(r))
    bad = np.flatnonzero(~(rq > EPS_Q))
    if bad.size:
        n = bad[0]
        raise DegenerateTetrahedronError(
            f"degenerate tetrahedron (Q/(sum 1/r)^2 = {rq.flat[n]:.3g}) "
            f"at weights {r.reshape(-1, 4)[n].tolist()}"
        )


def q_gradient(r) -> np.ndarray:
    """dQ/dr_a = -(2/r_a^2)(sum_{b != a} 1/r_b - 1/r_a)."""
    r = as_weights(r)
    inv = 1.0 / r
    return -2.0 * inv**2 * (inv.sum(-1, keepdims=True) - 2.0 * inv)


def face_geometry(r) -> tuple[np.ndarray, np.ndarray]:
    """Perimeter and area of the face opposite each slot.

    The face on weights (a, b, c) has perimeter 2(a + b + c) and area
    sqrt(a b c (a + b + c)).
    """
    r = as_weights(r)
    faces = r[..., _OTHERS]  # (..., 4, 3)
    s = faces.sum(-1)
    return 2.0 * s, np.sqrt(faces.prod(-1) * s)


def _cayley_menger_volume(rn):
    ell = rn[..., :, None] + rn[..., None, :]
    d2 = ell**2 * (1.0 - np.eye(4))
    cm = np.ones(rn.shape[:-1] + (5, 5))
    cm[..., 0, 0] = 0.0
    cm[..., 1:, 1:] = d2
    return np.sqrt(np.clip(np.linalg.det(cm) / 288.0, 0.0, None))


def volume(r) -> np.ndarray:
    """Volume from the Cayley-Menger determinant on lengths r_a + r_b."""
    r = as_weights(r)
    _require_nondegenerate(r)
    rn, s = _normalized(r)
    return _cayley_menger_volume(rn) * s**3


def _face_angle(ri, rj, rk):
    # incircle tangent lengths of a conformal triangle are the weights themselves
    return 2.0 * np.arctan(np.sqrt(rj * rk / (ri * (ri + rj + rk))))


def _beta_unchecked(rn, V):
    """Dihedral angles by EDGES, for already-normalized weights and their volume."""
    out = []
    for i, j in EDGES:
        k, l = (s for s in range(4) if s not in (i, j))
        ri, rj, rk, rl = rn[..., i], rn[..., j], rn[..., k], rn[..., l]
        a = _face_angle(ri, rj, rk)
        b = _face_angle(ri, rj, rl)
        c = _face_angle(ri, rk, rl)
        # spherical law of cosines at vertex i; sin part via the polar sine 6V / (l_ij l_ik l_il)
        x = np.cos(c) - np.cos(a) * np.cos(b)
        y = 6.0 * V / ((ri + rj) * (ri + rk) * (ri + rl))
        out.append(np.arctan2(y, x))
    return np.stack(out, axis=-1)


def _alpha_from_beta(beta):
    incident = [[n for n, e in enumerate(EDGES) if a in e] for a in range(4)]
    return np.stack([beta[..., idx].sum(-1) for idx in incident], axis=-1) - np.pi


def dihedral_and_solid_angles(r) -> tuple[np.ndarray, np.ndarray]:
    """Dihedral angles (by :data:`EDGES`) and solid angles (by slot).

    The solid angle at a vertex is the sum of the three dihedral angles along
    its edges minus pi.
    """
    r = as_weights(r)
    _require_nondegenerate(r)
    rn, _ = _normalized(r)
    beta = _beta_unchecked(rn, _cayley_menger_volume(rn))
    return beta, _alpha_from_beta(beta)


def solid_angles(r) -> np.ndarray:
    return dihedral_and_solid_angles(r)[1]


def volume_sine_formula(r) -> np.ndarray:
    """Volume recomputed along each edge as 2 A A sin(beta) / (3 l); shape (..., 6)."""
    r = as_weights(r)
    beta, _ = dihedral_and_solid_angles(r)
    _, A = face_geometry(r)
    out = []
    for n, (i, j) in enumerate(EDGES):
        k, l = (s for s in range(4) if s not in (i, j))
        # faces ijk and ijl are opposite l and k
        out.append(2.0 * A[..., l] * A[..., k] * np.sin(beta[..., n]) / (3.0 * (r[..., i] + r[..., j])))
    return np.stack(out, axis=-1)


def tetra_scalars(r) -> TetraScalars:
    r = as_weights(r)
    beta, alpha = dihedral_and_solid_angles(r)
    P, A = face_geometry(r)
    return TetraScalars(Q=nondegeneracy_q(r), P=P, A=A, V=volume(r), beta=beta, alpha=alpha)


def _perim(a, b, c):
    return 2.0 * (a + b + c)


def _dalpha_diag(ri, rj, rk, rl, V, Q):
    bracket = (
        (2.0 / ri + 1.0 / rj + 1.0 / rk + 1.0 / rl)
        + rj / ri * (1.0 / ri + 1.0 / rk + 1.0 / rl)
        + rk / ri * (1.0 / ri + 1.0 / rj + 1.0 / rl)
        + rl / ri * (1.0 / ri + 1.0 / rj + 1.0 / rk)
        + (2.0 * ri + rj + rk + rl) * Q
    )
    denom = 3.0 * _perim(ri, rj, rk) * _perim(ri, rj, rl) * _perim(ri, rk, rl) * V
    return -8.0 * rj**2 * rk**2 * rl**2 / denom * bracket


def _dalpha_off(ri, rj, rk, rl, V):
    paren = (
        (1.0 / rj + 1.0 / rk + 1.0 / rl) / ri
        + (1.0 / ri + 1.0 / rk + 1.0 / rl) / rj
        - (1.0 / rk - 1.0 / rl) ** 2
    )
    return 4.0 * ri * rj * rk**2 * rl**2 / (3.0 * _perim(ri, rj, rk) * _perim(ri, rj, rl) * V) * paren


def _dbeta(ri, rj, rk, rl, V):
    bracket = (
        -1.0 / rk**2
        - 1.0 / rl**2
        - 2.0 * rj / ri * (1.0 / (ri * rk) + 1.0 / (ri * rl) + (2.0 + rj / ri) / (rk * rl))
        + (1.0 / rj - 1.0 / ri) * (2.0 / ri + 1.0 / rk + 1.0 / rl)
    )
    return 2.0 * ri * rj * rk**2 * rl**2 / (3.0 * _perim(ri, rj, rk) * _perim(ri, rj, rl) * V) * bracket


def _prepared(r):
    r = as_weights(r)
    _require_nondegenerate(r)
    rn, s = _normalized(r)
    inv = 1.0 / rn
    Q = inv.sum(-1) ** 2 - 2.0 * (inv**2).sum(-1)
    return rn, s, _cayley_menger_volume(rn), Q


def _slots(rn, *idx):
    return tuple(rn[..., i] for i in idx)


def dalpha_dri(r, a: int) -> np.ndarray:
    """d(alpha_a)/d(r_a); strictly negative on nondegenerate tetrahedra."""
    rn, s, V, Q = _prepared(r)
    j, k, l = _OTHERS[a]
    return _dalpha_diag(*_slots(rn, a, j, k, l), V, Q) / s


def dalpha_drj(r, a: int, b: int) -> np.ndarray:
    """d(alpha_a)/d(r_b) for b != a."""
    if a == b:
        raise ValueError("dalpha_drj needs two distinct slots; use dalpha_dri")
    rn, s, V, _ = _prepared(r)
    k, l = (x for x in range(4) if x not in (a, b))
    return _dalpha_off(*_slots(rn, a, b, k, l), V) / s


def _dalpha_normalized(rn, V, Q):
    rows = []
    for a in range(4):
        row = []
        for b in range(4):
            if a == b:
                j, k, l = _OTHERS[a]
                row.append(_dalpha_diag(*_slots(rn, a, j, k, l), V, Q))
            else:
                k, l = (x for x in range(4) if x not in (a, b))
                row.append(_dalpha_off(*_slots(rn, a, b, k, l), V))
        rows.append(np.stack(row, axis=-1))
    return np.stack(rows, axis=-2)


def dalpha_matrix(r) -> np.ndarray:
    """The symmetric 4x4 matrix of d(alpha_a)/d(r_b)."""
    rn, s, V, Q = _prepared(r)
    return _dalpha_normalized(rn, V, Q) / s[..., None, None]


def omega_block(r) -> JacobianBlock:
    """Jacobian and the Laplacian weights Omega_ab = d(alpha_a)/d(r_b) r_b (zero diagonal)."""
    rn, s, V, Q = _prepared(r)
    d = _dalpha_normalized(rn, V, Q)
    omega = np.where(np.eye(4, dtype=bool), 0.0, d * rn[..., None, :])
    return JacobianBlock(dalpha=d / s[..., None, None], omega=omega)


def dbeta_dri(r, i: int, j: int) -> np.ndarray:
    """Derivative of the dihedral angle along edge (i, j) with respect to r_i."""
    if i == j:
        raise ValueError("edge needs two distinct slots")
    rn, s, V, _ = _prepared(r)
    k, l = (x for x in range(4) if x not in (i, j))
    return _dbeta(*_slots(rn, i, j, k, l), V) / s
