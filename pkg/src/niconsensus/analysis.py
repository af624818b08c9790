"""Trajectory checks: dissipation inequalities, Lyapunov decay, consensus.

Every check follows one convention: a residual series lhs - rhs is formed at
each recorded sample from exact gradients and chain rules, the violation is
max(0, lhs - rhs), and the check passes when the largest violation stays
below its tolerance. The default tolerance of 1e-6 absorbs floating-point
accumulation only; there is no differentiation noise to absorb because no
sampled signal is ever differenced.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, laplacian
from .linsys import dc_gain
from .network import ControllerNetwork
from .plant import StorageFunction
from .sim import IntegratorConfig, Trajectory, rk4_path

DEFAULT_TOL = 1e-6


@dataclass(frozen=True)
class CheckReport:
    name: str
    max_violation: float
    time_of_max: float
    tolerance: float
    passed: bool


def _report(name: str, violations: np.ndarray, times: np.ndarray,
            tol: float) -> CheckReport:
    worst = int(np.argmax(violations))
    max_violation = float(violations[worst])
    return CheckReport(name=name, max_violation=max_violation,
                       time_of_max=float(times[worst]), tolerance=tol,
                       passed=max_violation <= tol)


def _node_cols(traj: Trajectory, node: int) -> slice:
    m = traj.system.io_dim
    return slice(node * m, (node + 1) * m)


def _ctrl_derivs(traj: Trajectory, node: int) -> np.ndarray:
    """Exact dxc/dt of one controller subsystem at every sample."""
    cl = traj.system
    xc = traj.node_ctrl_states(node)
    u2 = traj.y1[:, _node_cols(traj, node)]
    if cl.mode == "pair":
        return np.array([cl.controller.f(xc[k], u2[k]) for k in range(traj.n_samples)])
    sysm = cl.controller.node_controller
    return xc @ sysm.A.T + u2 @ sysm.B.T


def ni_dissipation_residuals(traj: Trajectory, v: StorageFunction,
                             node: int = 0) -> np.ndarray:
    """dV/dt - u^T dy/dt along plant subsystem ``node`` (<= 0 when NI,
    identically 0 for lossless plants)."""
    cl = traj.system
    xs = traj.node_plant_states(node)
    cols = _node_cols(traj, node)
    u1 = traj.u1[:, cols]
    y1dot = traj.y1dot[:, cols]
    out = np.empty(traj.n_samples)
    plant = cl.plants[node if cl.mode == "network" else 0]
    for k in range(traj.n_samples):
        dx = plant.f(xs[k], u1[k])
        out[k] = float(v.grad(xs[k]) @ dx) - float(u1[k] @ y1dot[k])
    return out


def check_ni_dissipation(traj: Trajectory, v: StorageFunction, node: int = 0,
                         tol: float = DEFAULT_TOL) -> CheckReport:
    residuals = ni_dissipation_residuals(traj, v, node)
    return _report(f"ni_dissipation_node_{node}", np.maximum(residuals, 0.0),
                   traj.times, tol)


def osni_dissipation_residuals(traj: Trajectory, v: StorageFunction,
                               delta: float, node: int = 0) -> np.ndarray:
    """dV/dt - u^T dy/dt + delta |dy/dt|^2 along controller subsystem
    ``node``. For the lag a/(s+b) with storage (b/2a) x^2 this equals
    -(1/a - delta) |dy/dt|^2 identically."""
    if delta <= 0:
        raise ValueError("strictness level delta must be positive")
    cols = _node_cols(traj, node)
    xc = traj.node_ctrl_states(node)
    u2 = traj.y1[:, cols]
    ycdot = traj.ycdot[:, cols]
    dxc = _ctrl_derivs(traj, node)
    out = np.empty(traj.n_samples)
    for k in range(traj.n_samples):
        rate = float(v.grad(xc[k]) @ dxc[k])
        out[k] = rate - float(u2[k] @ ycdot[k]) + delta * float(ycdot[k] @ ycdot[k])
    return out


def check_osni_dissipation(traj: Trajectory, v: StorageFunction, delta: float,
                           node: int = 0, tol: float = DEFAULT_TOL) -> CheckReport:
    residuals = osni_dissipation_residuals(traj, v, delta, node)
    return _report(f"osni_dissipation_node_{node}", np.maximum(residuals, 0.0),
                   traj.times, tol)


def edge_rate_sums(traj: Trajectory) -> np.ndarray:
    """Per-sample ordered-pair sum of squared controller output-rate
    differences over the graph edges (each edge counted in both directions)."""
    cl = traj.system
    if cl.mode != "network":
        raise ValueError("edge rate sums need a network-mode trajectory")
    m = cl.io_dim
    ycdot = traj.ycdot.reshape(traj.n_samples, cl.n_plants, m)
    total = np.zeros(traj.n_samples)
    for i, j in cl.graph.edge_list:
        diff = ycdot[:, i, :] - ycdot[:, j, :]
        total += 2.0 * np.sum(diff * diff, axis=1)
    return total


def check_osni_like_network(traj: Trajectory, v2: StorageFunction, g: Graph,
                            delta: float, tol: float = DEFAULT_TOL) -> CheckReport:
    """Edge-wise output strictness of the controller bank.

    Verifies d/dt [ (1/2) sum_ij a_ij V2(xc_i - xc_j) ]
             <= U2^T dY2/dt - (delta/2) sum_ij a_ij |d(yc_i - yc_j)/dt|^2.
    """
    if delta <= 0:
        raise ValueError("strictness level delta must be positive")
    cl = traj.system
    if cl.mode != "network":
        raise ValueError("network dissipation check needs a network-mode trajectory")
    net = cl.controller
    strictness = 0.5 * delta * edge_rate_sums(traj)
    residuals = np.empty(traj.n_samples)
    for k in range(traj.n_samples):
        _, xc_flat = cl.split(traj.states[k])
        xc = net.node_states(xc_flat)
        dxc = net.node_states(net.deriv(xc_flat, traj.y1[k]))
        storage_rate = 0.0
        for i, j in g.edge_list:
            d = xc[i] - xc[j]
            dd = dxc[i] - dxc[j]
            storage_rate += 0.5 * float(v2.grad(d) @ dd - v2.grad(-d) @ dd)
        supply = float(traj.y1[k] @ traj.y2dot[k])
        residuals[k] = storage_rate - (supply - strictness[k])
    return _report("osni_like_network", np.maximum(residuals, 0.0), traj.times, tol)


def check_pair_identities(traj: Trajectory, tol: float = 1e-12) -> CheckReport:
    """Algebraic identities of a two-node controller bank.

    With inputs (u_1, u_2) and mixed outputs (yc_1 - yc_2, yc_2 - yc_1):
        U2 . dY2/dt = (u_1 - u_2) . d(yc_1 - yc_2)/dt
        |dY2/dt|^2  = 2 |d(yc_1 - yc_2)/dt|^2
    Checked against the stored trajectory columns at every sample.
    """
    cl = traj.system
    if cl.mode != "network" or cl.n_plants != 2:
        raise ValueError("pair identities need a 2-node network trajectory")
    m = cl.io_dim
    u2 = traj.y1
    du = u2[:, :m] - u2[:, m:]
    dycdot = traj.ycdot[:, :m] - traj.ycdot[:, m:]
    lhs1 = np.sum(u2 * traj.y2dot, axis=1)
    rhs1 = np.sum(du * dycdot, axis=1)
    lhs2 = np.sum(traj.y2dot ** 2, axis=1)
    rhs2 = 2.0 * np.sum(dycdot ** 2, axis=1)
    violations = np.maximum(np.abs(lhs1 - rhs1), np.abs(lhs2 - rhs2))
    return _report("pair_identities", violations, traj.times, tol)


def check_lyapunov_monotone(traj: Trajectory, cs, delta: float,
                            g: Graph | None = None,
                            tol: float = DEFAULT_TOL) -> CheckReport:
    """Decay of the composite storage W along the trajectory.

    Verifies the rate bound at every sample
        dW/dt <= -(delta/2) sum_ij a_ij |d(yc_i - yc_j)/dt|^2   (network)
        dW/dt <= -delta |dy2/dt|^2                              (pair)
    and monotonicity W(t_{k+1}) <= W(t_k) + tol across samples, with dW/dt
    from exact gradients.
    """
    cl = traj.system
    values = np.array([cs.value(x) for x in traj.states])
    rates = np.array([cs.rate(x) for x in traj.states])
    if cl.mode == "network":
        bound = -0.5 * delta * edge_rate_sums(traj)
    else:
        bound = -delta * np.sum(traj.y2dot ** 2, axis=1)
    rate_violation = np.maximum(rates - bound, 0.0)
    mono_violation = np.concatenate([[0.0], np.maximum(np.diff(values), 0.0)])
    return _report("lyapunov_monotone",
                   np.maximum(rate_violation, mono_violation), traj.times, tol)


def consensus_metric(traj: Trajectory, g: Graph | None = None):
    """Largest plant-output disagreement per sample.

    Returns (edge_max, all_pairs_max): the max of |y_i - y_j| over graph
    edges and over all node pairs respectively.
    """
    cl = traj.system
    if cl.mode != "network":
        raise ValueError("consensus metric needs a network-mode trajectory")
    g = g or cl.graph
    m = cl.io_dim
    y1 = traj.y1.reshape(traj.n_samples, cl.n_plants, m)
    def pair_dist(i, j):
        return np.linalg.norm(y1[:, i, :] - y1[:, j, :], axis=1)
    edge_max = np.max([pair_dist(i, j) for i, j in g.edge_list], axis=0)
    all_pairs = np.max([pair_dist(i, j) for i in range(cl.n_plants)
                        for j in range(i + 1, cl.n_plants)], axis=0)
    return edge_max, all_pairs


def check_steady_state_relation(net: ControllerNetwork, u2bar,
                                tol: float = DEFAULT_TOL) -> CheckReport:
    """Long-run output of the controller bank against its DC map.

    Simulates the bank from rest under the constant input and compares the
    settled output with (L (x) M(0)) u2bar. The horizon is set from the
    slowest controller mode so the transient is below round-off.
    """
    u2bar = np.asarray(u2bar, dtype=float).reshape(-1)
    if u2bar.size != net.io_dim:
        raise ValueError(f"constant input must have length {net.io_dim}")
    eigs = np.linalg.eigvals(net.node_controller.A)
    decay = float(np.max(eigs.real))
    if decay >= 0:
        raise ValueError("steady-state relation needs a Hurwitz controller")
    t_end = min(60.0 / -decay, 1e4)
    step = min(0.5 / float(np.max(np.abs(eigs))), t_end / 50.0)
    field = lambda xc: net.deriv(xc, u2bar)
    cfg = IntegratorConfig(step_s=step, t_end_s=t_end, record_every=10 ** 9)
    _, states = rk4_path(field, np.zeros(net.state_dim), cfg)
    settled = net.network_output(states[-1]).reshape(-1)
    expected = np.kron(laplacian(net.graph), dc_gain(net.node_controller)) @ u2bar
    violation = float(np.abs(settled - expected).max())
    return CheckReport(name="steady_state_relation", max_violation=violation,
                       time_of_max=t_end, tolerance=tol, passed=violation <= tol)
