"""Unit quaternion algebra for the attitude-only part of the estimator.

Quaternions are plain numpy arrays ``[w, x, y, z]`` with the scalar part
first.  The product convention is chosen so that the rotation map is a
homomorphism: ``quat_to_rot(quat_product(a, b)) == quat_to_rot(a) @ quat_to_rot(b)``.
"""

from __future__ import annotations

import numpy as np

from .liegroup import skew

# Unit-norm tolerance accepted by quat_to_rot.
TOL_UNIT = 1e-6


class NonUnitQuaternion(ValueError):
    """Raised when an operation requires a unit quaternion and the norm is off."""


def quat_identity() -> np.ndarray:
    return np.array([1.0, 0.0, 0.0, 0.0])


def quat_normalize(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    n = float(np.linalg.norm(q))
    if n == 0.0:
        raise NonUnitQuaternion("cannot normalize the zero quaternion")
    return q / n


def quat_conjugate(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return np.array([q[0], -q[1], -q[2], -q[3]])


def quat_product(q1: np.ndarray, q2: np.ndarray) -> np.ndarray:
    """Quaternion product; scalar part ``w1 w2 - v1 . v2``."""
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    w1, v1 = q1[0], q1[1:]
    w2, v2 = q2[0], q2[1:]
    w = w1 * w2 - v1 @ v2
    v = w1 * v2 + w2 * v1 + np.cross(v1, v2)
    return np.array([w, v[0], v[1], v[2]])


def quat_to_rot(q: np.ndarray) -> np.ndarray:
    """Rotation matrix of a unit quaternion.

    Raises
    ------
    NonUnitQuaternion
        If the norm deviates from one by more than ``TOL_UNIT``.
    """
    q = np.asarray(q, dtype=float)
    if abs(float(np.linalg.norm(q)) - 1.0) > TOL_UNIT:
        raise NonUnitQuaternion("quaternion norm deviates from 1 beyond tolerance")
    w, v = q[0], q[1:]
    return (w * w - v @ v) * np.eye(3) + 2.0 * np.outer(v, v) + 2.0 * w * skew(v)


def rot_to_quat(r: np.ndarray) -> np.ndarray:
    """Unit quaternion of a rotation matrix, scalar part nonnegative.

    Branches on the largest of the four squared components so the divisions
    stay well conditioned for every attitude, including half-turns.
    """
    r = np.asarray(r, dtype=float)
    t = float(np.trace(r))
    # squared components up to a common factor of 4
    cand = np.array([
        1.0 + t,
        1.0 + r[0, 0] - r[1, 1] - r[2, 2],
        1.0 - r[0, 0] + r[1, 1] - r[2, 2],
        1.0 - r[0, 0] - r[1, 1] + r[2, 2],
    ])
    i = int(np.argmax(cand))
    s = 2.0 * np.sqrt(max(cand[i], 0.0))
    if i == 0:
        q = np.array([0.25 * s,
                      (r[2, 1] - r[1, 2]) / s,
                      (r[0, 2] - r[2, 0]) / s,
                      (r[1, 0] - r[0, 1]) / s])
    elif i == 1:
        q = np.array([(r[2, 1] - r[1, 2]) / s,
                      0.25 * s,
                      (r[0, 1] + r[1, 0]) / s,
                      (r[0, 2] + r[2, 0]) / s])
    elif i == 2:
        q = np.array([(r[0, 2] - r[2, 0]) / s,
                      (r[0, 1] + r[1, 0]) / s,
                      0.25 * s,
                      (r[1, 2] + r[2, 1]) / s])
    else:
        q = np.array([(r[1, 0] - r[0, 1]) / s,
                      (r[0, 2] + r[2, 0]) / s,
                      (r[1, 2] + r[2, 1]) / s,
                      0.25 * s])
    if q[0] < 0.0:
        q = -q
    return q / np.linalg.norm(q)


def quat_from_rotvec(v: np.ndarray) -> np.ndarray:
    """Unit quaternion of the rotation vector ``v`` (axis times angle)."""
    v = np.asarray(v, dtype=float)
    theta = float(np.linalg.norm(v))
    if theta < 1e-8:
        # first-order series; renormalized to kill the O(theta^2) defect
        q = np.array([1.0, 0.5 * v[0], 0.5 * v[1], 0.5 * v[2]])
        return q / np.linalg.norm(q)
    half = 0.5 * theta
    axis = v / theta
    s = np.sin(half)
    return np.array([np.cos(half), s * axis[0], s * axis[1], s * axis[2]])
