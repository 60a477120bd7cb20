"""Concrete systems: attitude kinematics with two direction measurements,
sphere kinematics, and SLAM with discrete-time relative-pose recovery."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import actions as ac
from . import groups, observer
from .actions import Point, act
from .errors import DimensionError, RankDeficiencyError
from .groups import SE3, SO3, AlgebraElement, GroupElement, Metric
from .integrate import IntegratorConfig, Trajectory, integrate_system
from .observer import ObserverProblem, preobserver_rate, zeta_e
from .sampling import rng_from

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])

_COND_LIMIT = 1e12


# -- attitude --

def attitude_cost(y: Point, y_est: Point) -> float:
    """Sum of squared distances between the two measured directions."""
    (a2, a3), (b2, b3) = y.value, y_est.value
    return float(np.dot(a2 - b2, a2 - b2) + np.dot(a3 - b3, a3 - b3))


def attitude_zeta_e(R_est: GroupElement, y: Point) -> AlgebraElement:
    """Analytic gradient direction: sum over k of -2 e_k^ (R~ y_k)."""
    y2, y3 = y.value
    R = R_est.matrix
    ze = -2.0 * (np.cross(E2, R @ y2) + np.cross(E3, R @ y3))
    return AlgebraElement("so3", ze)


def attitude_problem(metric: Metric = Metric(), analytic: bool = True) -> ObserverProblem:
    """Left-observed attitude estimation from two inertial directions."""
    return ObserverProblem(
        group_kind=SO3,
        handedness="left",
        output_action=ac.so3_on_direction_pair(),
        y0=Point(ac.DIRECTION_PAIR, (E2, E3)),
        cost=attitude_cost,
        metric=metric,
        zeta_e_analytic=attitude_zeta_e if analytic else None,
    )


def measure_attitude(R: GroupElement, noise_amp: float = 0.0, rng=None) -> Point:
    """y = (R^T e2, R^T e3); optional uniform perturbation, re-normalized."""
    y2 = R.matrix.T @ E2
    y3 = R.matrix.T @ E3
    if noise_amp > 0.0:
        y2 = y2 + rng.uniform(-noise_amp, noise_amp, size=3)
        y3 = y3 + rng.uniform(-noise_amp, noise_amp, size=3)
        y2 /= np.linalg.norm(y2)
        y3 /= np.linalg.norm(y3)
    return Point(ac.DIRECTION_PAIR, (y2, y3))


def attitude_vector_field(p: Point, omega: AlgebraElement):
    """Right-translation-equivariant kinematics R' = R Omega^."""
    return p.value.matrix @ omega.matrix


@dataclass(frozen=True)
class AttitudeScenario:
    """Closed-loop attitude observer run."""

    omega: Callable[[float], np.ndarray]
    gain: float = 1.0
    noise_amp: float = 0.0
    seed: int = 42


def simulate_attitude_observer(
    R0: GroupElement,
    R_est0: GroupElement,
    scenario: AttitudeScenario,
    config: IntegratorConfig,
) -> Trajectory:
    """Integrate true attitude and pre-observer together.

    Records V^e and ||zeta_e|| per sample; the observer sees the (possibly
    noisy) measured rate and directions, the recorded diagnostics use the
    noiseless ones.
    """
    prob = attitude_problem()
    rng = rng_from(scenario.seed)
    noise = scenario.noise_amp

    def rate(t, state):
        om = np.asarray(scenario.omega(t), dtype=float)
        om_meas = om + rng.uniform(-noise, noise, size=3) if noise > 0 else om
        y = measure_attitude(state["R"], noise, rng)
        est_rate = observer.preobserver_split_rate(
            prob, state["Rhat"], y, AlgebraElement("so3", om_meas), scenario.gain
        )
        return {"R": AlgebraElement("so3", om), "Rhat": est_rate}

    def record(t, state):
        e_g = observer.group_error(prob, state["R"], state["Rhat"])
        ze = zeta_e(prob, state["Rhat"], measure_attitude(state["R"]))
        return {"Ve": prob.error_cost(e_g), "zeta_e_norm": ze.norm()}

    return integrate_system(
        rate, config, {"R": R0, "Rhat": R_est0}, sides={"R": "left", "Rhat": "left"}, record=record
    )


def simulate_error_dynamics(
    prob: ObserverProblem, e0: GroupElement, gain: float, config: IntegratorConfig
) -> Trajectory:
    """Integrate the autonomous error flow e' = e (-k zeta_e)^ directly."""

    def rate(t, state):
        return {"e": observer.error_rate(prob, state["e"], gain)}

    def record(t, state):
        return {"Ve": prob.error_cost(state["e"])}

    side = "left" if prob.handedness == "left" else "right"
    return integrate_system(rate, config, {"e": e0}, sides={"e": side}, record=record)


# -- sphere kinematics --

def sphere_vector_field(p: Point, v):
    """Free-particle kinematics q' = v on R^3 \\ {0}."""
    return np.asarray(v, dtype=float)


# -- SLAM --

def make_slam_state(S: GroupElement, landmarks) -> Point:
    return Point(ac.LANDMARK_TUPLE, (S, np.asarray(landmarks, dtype=float)))


def slam_vector_field(p: Point, v):
    """X(p, v) = (S V^, S vbar_i) for input v = (V, vbar columns)."""
    S, L = p.value
    V, vbar = v
    vbar = np.asarray(vbar, dtype=float)
    if vbar.shape != L.shape:
        raise DimensionError(f"landmark velocity shape {vbar.shape} != {L.shape}")
    return (S.matrix @ V.matrix, S.matrix @ vbar)


def slam_landmark_cost(y: Point, y_est: Point) -> float:
    """Sum of squared landmark column distances."""
    A, B = np.asarray(y.value), np.asarray(y_est.value)
    if A.shape != B.shape:
        raise DimensionError(f"landmark count mismatch: {A.shape} vs {B.shape}")
    d = A[:3] - B[:3]
    return float(np.sum(d * d))


def slam_problem(landmarks) -> ObserverProblem:
    """Left-observed SE(3) pose observer from body-frame landmark columns.

    y0 holds the inertial landmarks, so y = S^-1 Lbar_i reproduces the
    measurements; zeta_e comes from the numeric gradient.
    """
    L = np.asarray(landmarks, dtype=float)
    return ObserverProblem(
        group_kind=SE3,
        handedness="left",
        output_action=ac.se3_on_landmarks(L.shape[1]),
        y0=Point(ac.LANDMARKS, L),
        cost=slam_landmark_cost,
    )


def slam_discrete_recover(M_k, M_k1) -> GroupElement:
    """Relative pose from two landmark measurement matrices.

    S^k = M_k M_{k+1}^T (M_{k+1} M_{k+1}^T)^{-1}, projected onto SE(3).
    Raises RankDeficiencyError for coplanar or too few landmarks.
    """
    M_k = np.asarray(M_k, dtype=float)
    M_k1 = np.asarray(M_k1, dtype=float)
    if M_k.shape != M_k1.shape or M_k.shape[0] != 4 or M_k.shape[1] < 4:
        raise DimensionError("measurement matrices must be matching 4xN with N >= 4")
    gram = M_k1 @ M_k1.T
    if np.linalg.cond(gram) >= _COND_LIMIT:
        raise RankDeficiencyError(
            "M M^T is singular or ill-conditioned (coplanar or too few landmarks)"
        )
    S = M_k @ M_k1.T @ np.linalg.inv(gram)
    return groups.project_to_group(S, SE3)


def simulate_slam_poses(
    S0: GroupElement,
    landmarks,
    twist: Callable[[float], AlgebraElement],
    n_steps: int,
    h: float,
) -> tuple[list[GroupElement], list[np.ndarray]]:
    """Propagate S' = S V^ and collect measurement matrices M_k = S_k^-1 Lbar."""
    L = np.asarray(landmarks, dtype=float)
    config = IntegratorConfig(method="rk4_cg", h=h, t_final=n_steps * h)

    def rate(t, state):
        return {"S": twist(t)}

    traj = integrate_system(rate, config, {"S": S0}, sides={"S": "left"})
    poses = [s["S"] for s in traj.states]
    measurements = [S.inverse().matrix @ L for S in poses]
    return poses, measurements


def measure_landmarks(S: GroupElement, landmarks, noise_amp: float = 0.0, rng=None) -> Point:
    """Body-frame landmark matrix M = S^-1 Lbar, optionally perturbed."""
    M = S.inverse().matrix @ np.asarray(landmarks, dtype=float)
    if noise_amp > 0.0:
        M = M.copy()
        M[:3] += rng.uniform(-noise_amp, noise_amp, size=M[:3].shape)
    return Point(ac.LANDMARKS, M)


def simulate_slam_observer(
    S0: GroupElement,
    S_est0: GroupElement,
    landmarks,
    twist: Callable[[float], AlgebraElement],
    gain: float,
    config: IntegratorConfig,
    noise_amp: float = 0.0,
    seed: int = 42,
) -> Trajectory:
    """Integrate true pose S' = S V^ alongside the gradient pre-observer."""
    L = np.asarray(landmarks, dtype=float)
    prob = slam_problem(L)
    rng = rng_from(seed)

    def rate(t, state):
        V = twist(t)
        V_meas = V
        if noise_amp > 0.0:
            V_meas = AlgebraElement("se3", V.vec + rng.uniform(-noise_amp, noise_amp, size=6))
        y = measure_landmarks(state["S"], L, noise_amp, rng)
        est_rate = observer.preobserver_split_rate(prob, state["Shat"], y, V_meas, gain)
        return {"S": V, "Shat": est_rate}

    def record(t, state):
        e_g = observer.group_error(prob, state["S"], state["Shat"])
        ze = zeta_e(prob, state["Shat"], measure_landmarks(state["S"], L))
        return {"Ve": prob.error_cost(e_g), "zeta_e_norm": ze.norm()}

    return integrate_system(
        rate, config, {"S": S0, "Shat": S_est0}, sides={"S": "left", "Shat": "left"}, record=record
    )


def recover_pose_chain(measurements) -> list[GroupElement]:
    """Relative poses S^k with S^k M_{k+1} = M_k along a measurement sequence."""
    return [
        slam_discrete_recover(measurements[k], measurements[k + 1])
        for k in range(len(measurements) - 1)
    ]
