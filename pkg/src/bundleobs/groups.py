"""Matrix Lie group primitives for SO(3) and SE(3).

Elements are stored as plain numpy matrices (3x3 rotations, 4x4 homogeneous
transforms) with membership checked at construction.  Algebra elements carry
their coordinate vector; the matrix form is derived by ``hat``.  se(3)
coordinates are ordered (linear, angular) to match the homogeneous block
layout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BranchAmbiguityError,
    DimensionError,
    KindMismatchError,
    NumericalBlowupError,
    ProjectionFailureError,
)

SO3 = "SO3"
SE3 = "SE3"

_ORTHO_TOL = 1e-9
_SMALL_ANGLE = 1e-6
_PI_EXCLUSION = 1e-7

_ALGEBRA_OF_GROUP = {SO3: "so3", SE3: "se3"}
_GROUP_OF_ALGEBRA = {"so3": SO3, "se3": SE3}
_DIM_OF_ALGEBRA = {"so3": 3, "se3": 6}


def _check_rotation(R: np.ndarray) -> None:
    if R.shape != (3, 3):
        raise DimensionError(f"rotation block must be 3x3, got {R.shape}")
    defect = np.linalg.norm(R.T @ R - np.eye(3))
    if defect > _ORTHO_TOL:
        raise ProjectionFailureError(f"not orthogonal: ||R^T R - I|| = {defect:.3e}")
    if np.linalg.det(R) <= 0:
        raise ProjectionFailureError("rotation block has non-positive determinant")


@dataclass(frozen=True)
class GroupElement:
    """An element of SO(3) or SE(3) as a (homogeneous) matrix."""

    kind: str
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if not np.all(np.isfinite(m)):
            raise NumericalBlowupError("group matrix has non-finite entries")
        if self.kind == SO3:
            _check_rotation(m)
        elif self.kind == SE3:
            if m.shape != (4, 4):
                raise DimensionError(f"SE3 matrix must be 4x4, got {m.shape}")
            _check_rotation(m[:3, :3])
            if not np.array_equal(m[3], np.array([0.0, 0.0, 0.0, 1.0])):
                m = m.copy()
                if np.linalg.norm(m[3] - np.array([0.0, 0.0, 0.0, 1.0])) > 1e-12:
                    raise ProjectionFailureError("bottom row of SE3 matrix is not (0,0,0,1)")
                m[3] = np.array([0.0, 0.0, 0.0, 1.0])
        else:
            raise KindMismatchError(f"unknown group kind {self.kind!r}")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, kind: str) -> "GroupElement":
        n = 3 if kind == SO3 else 4
        return cls(kind, np.eye(n))

    @property
    def algebra_kind(self) -> str:
        return _ALGEBRA_OF_GROUP[self.kind]

    def rotation(self) -> np.ndarray:
        return self.matrix if self.kind == SO3 else self.matrix[:3, :3]

    def translation(self) -> np.ndarray:
        if self.kind != SE3:
            raise KindMismatchError("translation only defined for SE3")
        return self.matrix[:3, 3]

    def inverse(self) -> "GroupElement":
        if self.kind == SO3:
            return GroupElement(SO3, self.matrix.T)
        R = self.rotation()
        t = self.translation()
        m = np.eye(4)
        m[:3, :3] = R.T
        m[:3, 3] = -R.T @ t
        return GroupElement(SE3, m)

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        if self.kind != other.kind:
            raise KindMismatchError(f"cannot compose {self.kind} with {other.kind}")
        return GroupElement(self.kind, self.matrix @ other.matrix)

    def is_close(self, other: "GroupElement", tol: float = 1e-9) -> bool:
        return self.kind == other.kind and np.linalg.norm(self.matrix - other.matrix) <= tol


@dataclass(frozen=True)
class AlgebraElement:
    """A Lie algebra element of so(3) or se(3) in coordinate form.

    so(3) coordinates are the rotation-rate axis; se(3) coordinates are
    (linear, angular).
    """

    kind: str
    vec: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vec, dtype=float)
        if self.kind not in _DIM_OF_ALGEBRA:
            raise KindMismatchError(f"unknown algebra kind {self.kind!r}")
        if v.shape != (_DIM_OF_ALGEBRA[self.kind],):
            raise DimensionError(
                f"{self.kind} coordinates must have length {_DIM_OF_ALGEBRA[self.kind]}, got shape {v.shape}"
            )
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "vec", v)

    @classmethod
    def zero(cls, kind: str) -> "AlgebraElement":
        return cls(kind, np.zeros(_DIM_OF_ALGEBRA[kind]))

    @property
    def group_kind(self) -> str:
        return _GROUP_OF_ALGEBRA[self.kind]

    @property
    def matrix(self) -> np.ndarray:
        return hat_matrix(self.vec)

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        if self.kind != other.kind:
            raise KindMismatchError(f"cannot add {self.kind} and {other.kind}")
        return AlgebraElement(self.kind, self.vec + other.vec)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        if self.kind != other.kind:
            raise KindMismatchError(f"cannot subtract {self.kind} and {other.kind}")
        return AlgebraElement(self.kind, self.vec - other.vec)

    def __mul__(self, c: float) -> "AlgebraElement":
        return AlgebraElement(self.kind, c * self.vec)

    __rmul__ = __mul__

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.kind, -self.vec)

    def norm(self) -> float:
        return float(np.linalg.norm(self.vec))


@dataclass(frozen=True)
class Metric:
    """Bi-invariant inner product on the algebra (scaled coordinate dot)."""

    kind: str = "bi_invariant"
    scale: float = 1.0

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("metric scale must be positive")


def skew(w: np.ndarray) -> np.ndarray:
    """3x3 antisymmetric matrix with skew(w) @ x == cross(w, x)."""
    x, y, z = w
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def hat_matrix(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape == (3,):
        return skew(v)
    if v.shape == (6,):
        m = np.zeros((4, 4))
        m[:3, :3] = skew(v[3:])
        m[:3, 3] = v[:3]
        return m
    raise DimensionError(f"hat expects a length-3 or length-6 vector, got shape {v.shape}")


def hat(v) -> AlgebraElement:
    """Wrap a coordinate vector as an algebra element (kind from its length)."""
    v = np.asarray(v, dtype=float)
    if v.shape == (3,):
        return AlgebraElement("so3", v)
    if v.shape == (6,):
        return AlgebraElement("se3", v)
    raise DimensionError(f"hat expects a length-3 or length-6 vector, got shape {v.shape}")


def vee(zeta) -> np.ndarray:
    """Coordinates of an algebra element; inverse of hat (bit-identical)."""
    if isinstance(zeta, AlgebraElement):
        return zeta.vec
    m = np.asarray(zeta, dtype=float)
    if m.shape == (3, 3):
        return np.array([m[2, 1], m[0, 2], m[1, 0]])
    if m.shape == (4, 4):
        return np.concatenate([m[:3, 3], np.array([m[2, 1], m[0, 2], m[1, 0]])])
    raise DimensionError(f"vee expects a 3x3 or 4x4 matrix, got shape {m.shape}")


def _so3_exp(w: np.ndarray) -> np.ndarray:
    theta = np.linalg.norm(w)
    W = skew(w)
    if theta < _SMALL_ANGLE:
        # 4-term Taylor of sin(t)/t and (1-cos t)/t^2
        t2 = theta * theta
        a = 1.0 - t2 / 6.0 * (1.0 - t2 / 20.0 * (1.0 - t2 / 42.0))
        b = 0.5 * (1.0 - t2 / 12.0 * (1.0 - t2 / 30.0 * (1.0 - t2 / 56.0)))
    else:
        a = math.sin(theta) / theta
        b = (1.0 - math.cos(theta)) / (theta * theta)
    return np.eye(3) + a * W + b * (W @ W)


def _so3_left_jacobian(w: np.ndarray) -> np.ndarray:
    """V matrix of the SE(3) closed-form exponential."""
    theta = np.linalg.norm(w)
    W = skew(w)
    if theta < _SMALL_ANGLE:
        t2 = theta * theta
        b = 0.5 * (1.0 - t2 / 12.0 * (1.0 - t2 / 30.0 * (1.0 - t2 / 56.0)))
        c = (1.0 / 6.0) * (1.0 - t2 / 20.0 * (1.0 - t2 / 42.0 * (1.0 - t2 / 72.0)))
    else:
        b = (1.0 - math.cos(theta)) / (theta * theta)
        c = (theta - math.sin(theta)) / (theta ** 3)
    return np.eye(3) + b * W + c * (W @ W)


def exp(zeta: AlgebraElement) -> GroupElement:
    """Matrix exponential onto the group (Rodrigues / closed SE(3) form)."""
    if not np.all(np.isfinite(zeta.vec)):
        raise NumericalBlowupError("algebra coordinates are non-finite")
    if zeta.kind == "so3":
        return GroupElement(SO3, _so3_exp(zeta.vec))
    v, w = zeta.vec[:3], zeta.vec[3:]
    m = np.eye(4)
    m[:3, :3] = _so3_exp(w)
    m[:3, 3] = _so3_left_jacobian(w) @ v
    return GroupElement(SE3, m)


def _so3_log(R: np.ndarray) -> np.ndarray:
    skew_part = 0.5 * (R - R.T)
    s_vec = np.array([skew_part[2, 1], skew_part[0, 2], skew_part[1, 0]])
    s = np.linalg.norm(s_vec)  # |sin(theta)|
    c = 0.5 * (np.trace(R) - 1.0)
    theta = math.atan2(s, c)
    if theta > math.pi - _PI_EXCLUSION:
        raise BranchAmbiguityError(
            f"rotation angle {theta:.12f} within {_PI_EXCLUSION:g} of pi; log branch ambiguous"
        )
    if theta < _SMALL_ANGLE:
        # theta/sin(theta) ~ 1 + t^2/6 + 7 t^4/360
        t2 = theta * theta
        factor = 1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0
        return factor * s_vec
    if theta > math.pi - 1e-3:
        # axis from the symmetric part; (R - R^T) only fixes the sign here:
        # u u^T = (R + R^T + (1 - tr R) I) / (3 - tr R)
        B = (R + R.T + (1.0 - np.trace(R)) * np.eye(3)) / (3.0 - np.trace(R))
        i = int(np.argmax(np.diag(B)))
        u = B[:, i] / math.sqrt(B[i, i])
        if np.dot(u, s_vec) < 0:
            u = -u
        return theta * u
    return (theta / s) * s_vec


def log(g: GroupElement) -> AlgebraElement:
    """Principal logarithm; raises BranchAmbiguityError within 1e-7 of pi."""
    if g.kind == SO3:
        return AlgebraElement("so3", _so3_log(g.matrix))
    w = _so3_log(g.rotation())
    V = _so3_left_jacobian(w)
    v = np.linalg.solve(V, g.translation())
    return AlgebraElement("se3", np.concatenate([v, w]))


def adjoint(g: GroupElement, zeta: AlgebraElement) -> AlgebraElement:
    """Ad_g zeta, computed as matrix conjugation g zeta^ g^-1."""
    if g.algebra_kind != zeta.kind:
        raise KindMismatchError(f"adjoint: {g.kind} element with {zeta.kind} algebra")
    conj = g.matrix @ zeta.matrix @ g.inverse().matrix
    return AlgebraElement(zeta.kind, vee(conj))


def bracket(zeta: AlgebraElement, eta: AlgebraElement) -> AlgebraElement:
    """Matrix commutator [zeta, eta] in coordinates."""
    if zeta.kind != eta.kind:
        raise KindMismatchError(f"bracket: {zeta.kind} with {eta.kind}")
    return AlgebraElement(zeta.kind, vee(zeta.matrix @ eta.matrix - eta.matrix @ zeta.matrix))


def inner(metric: Metric, zeta: AlgebraElement, eta: AlgebraElement) -> float:
    """Bi-invariant inner product: scaled coordinate dot product."""
    if zeta.kind != eta.kind:
        raise KindMismatchError(f"inner: {zeta.kind} with {eta.kind}")
    return float(metric.scale * np.dot(zeta.vec, eta.vec))


def project_to_group(m: np.ndarray, kind: str) -> GroupElement:
    """Nearest group element via SVD orthonormalization of the rotation block.

    The input must be within Frobenius distance 0.5 of the group; reflections
    and badly corrupted blocks raise ProjectionFailureError.
    """
    m = np.asarray(m, dtype=float)
    if kind == SO3:
        if m.shape != (3, 3):
            raise DimensionError(f"SO3 projection expects 3x3, got {m.shape}")
        block = m
    elif kind == SE3:
        if m.shape != (4, 4):
            raise DimensionError(f"SE3 projection expects 4x4, got {m.shape}")
        block = m[:3, :3]
    else:
        raise KindMismatchError(f"unknown group kind {kind!r}")
    U, _, Vt = np.linalg.svd(block)
    R = U @ Vt
    if np.linalg.det(R) < 0:
        R = U @ np.diag([1.0, 1.0, -1.0]) @ Vt
    if np.linalg.det(R) <= 0:
        raise ProjectionFailureError("orthonormalized block has non-positive determinant")
    if np.linalg.norm(R - block) > 0.5:
        raise ProjectionFailureError(
            f"matrix too far from {kind}: Frobenius distance {np.linalg.norm(R - block):.3e} > 0.5"
        )
    if kind == SO3:
        return GroupElement(SO3, R)
    out = np.eye(4)
    out[:3, :3] = R
    out[:3, 3] = m[:3, 3]
    return GroupElement(SE3, out)
