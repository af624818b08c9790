"""Deterministic fixed-step integration of closed loops and trajectory records.

Classical fourth-order Runge-Kutta with a fixed step. Fixed stepping keeps
runs bit-reproducible on one platform and gives the dissipation checks a
uniform sample spacing; adaptive stepping and stiff solvers are out of scope.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

#: Sentinel returned by convergence_order when the scheme is exact for the
#: given field (successive refinements agree to round-off).
EXACT = math.inf


@dataclass(frozen=True)
class IntegratorConfig:
    step_s: float
    t_end_s: float
    record_every: int = 1

    def __post_init__(self):
        if not (self.step_s > 0):
            raise ValueError("step_s must be positive")
        if self.t_end_s < self.step_s:
            raise ValueError("t_end_s must be at least one step")
        if self.record_every < 1:
            raise ValueError("record_every must be a positive integer")


class SimulationDiverged(RuntimeError):
    """Raised when the state leaves the finite floats."""

    def __init__(self, t: float, last_state: np.ndarray):
        super().__init__(f"divergence at t={t:.6g}")
        self.t = t
        self.last_state = last_state


def rk4_path(field, x0, cfg: IntegratorConfig):
    """Integrate dx/dt = field(x), returning (times, states) at the recorded
    samples: t = 0, every record_every-th step, and the final step."""
    h = cfg.step_s
    n_steps = max(1, round(cfg.t_end_s / h))
    x = np.array(x0, dtype=float)
    n_rec = n_steps // cfg.record_every + 1 + (1 if n_steps % cfg.record_every else 0)
    times = np.empty(n_rec)
    states = np.empty((n_rec, x.size))
    times[0], states[0] = 0.0, x
    rec = 1
    half = 0.5 * h
    sixth = h / 6.0
    # overflow on the way to divergence is reported via SimulationDiverged,
    # not as a numpy warning
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, n_steps + 1):
            k1 = field(x)
            k2 = field(x + half * k1)
            k3 = field(x + half * k2)
            k4 = field(x + h * k3)
            x = x + sixth * (k1 + 2.0 * (k2 + k3) + k4)
            if not np.all(np.isfinite(x)):
                raise SimulationDiverged(k * h, states[rec - 1])
            if k % cfg.record_every == 0 or k == n_steps:
                times[rec] = k * h
                states[rec] = x
                rec += 1
    return times[:rec], states[:rec]


@dataclass
class Trajectory:
    """Recorded closed-loop run: uniform sample instants, composite states,
    and every loop signal recomputed exactly at each recorded state."""

    system: object
    times: np.ndarray
    states: np.ndarray
    u1: np.ndarray
    y1: np.ndarray
    y1dot: np.ndarray
    yc: np.ndarray
    ycdot: np.ndarray
    y2: np.ndarray
    y2dot: np.ndarray

    @property
    def n_samples(self) -> int:
        return self.times.size

    def node_plant_states(self, i: int) -> np.ndarray:
        return self.states[:, self.system.plant_state_slice(i)]

    def node_ctrl_states(self, i: int) -> np.ndarray:
        return self.states[:, self.system.ctrl_state_slice(i)]

    def write_csv(self, path, extra_columns=None):
        """Column order: t, plant states node by node, controller states node
        by node, y1 per node, y2 per node, y1 rates, y2 rates, then any extra
        (name, series) columns."""
        cl = self.system
        p = cl.plants[0].p
        q = (cl.controller.p if cl.mode == "pair"
             else cl.controller.node_controller.state_dim)
        m = cl.io_dim
        header = ["t"]
        header += [f"x_plant_{i+1}_{k}" for i in range(cl.n_plants) for k in range(p)]
        n_ctrl = 1 if cl.mode == "pair" else cl.controller.n
        header += [f"x_ctrl_{i+1}_{k}" for i in range(n_ctrl) for k in range(q)]
        header += [f"y1_{i+1}_{k}" for i in range(cl.n_plants) for k in range(m)]
        header += [f"y2_{i+1}_{k}" for i in range(n_ctrl) for k in range(m)]
        header += [f"y1dot_{i+1}_{k}" for i in range(cl.n_plants) for k in range(m)]
        header += [f"y2dot_{i+1}_{k}" for i in range(n_ctrl) for k in range(m)]
        extras = list(extra_columns or [])
        header += [name for name, _ in extras]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for k in range(self.n_samples):
                row = [self.times[k], *self.states[k], *self.y1[k], *self.y2[k],
                       *self.y1dot[k], *self.y2dot[k]]
                row += [series[k] for _, series in extras]
                writer.writerow([f"{v:.12g}" for v in row])


def integrate(cl, x0, cfg: IntegratorConfig) -> Trajectory:
    """Run the closed loop from the composite state x0."""
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (cl.n_states,):
        raise ValueError(f"initial state must have length {cl.n_states}")
    times, states = rk4_path(cl.rhs, x0, cfg)
    cols = {name: np.empty((times.size, cl.n_plants * cl.io_dim))
            for name in ("u1", "y1", "y1dot")}
    n_ctrl_sig = cl.n_plants * cl.io_dim
    for name in ("yc", "ycdot", "y2", "y2dot"):
        cols[name] = np.empty((times.size, n_ctrl_sig))
    for k in range(times.size):
        sig = cl.evaluate(states[k])
        for name in cols:
            cols[name][k] = getattr(sig, name)
    return Trajectory(system=cl, times=times, states=states, **cols)


def convergence_order(system, x0, cfg: IntegratorConfig):
    """Observed order of accuracy by Richardson extrapolation.

    Integrates at steps h, h/2 and h/4 and compares terminal states; returns
    log2 of the ratio of successive differences (about 4 for smooth fields)
    or the EXACT sentinel when the differences are at round-off.
    """
    field = system.rhs if hasattr(system, "rhs") else system
    terminal = []
    for div in (1, 2, 4):
        sub = IntegratorConfig(step_s=cfg.step_s / div, t_end_s=cfg.t_end_s,
                               record_every=10 ** 9)
        _, states = rk4_path(field, x0, sub)
        terminal.append(states[-1])
    scale = 1.0 + float(np.linalg.norm(terminal[-1]))
    d1 = float(np.linalg.norm(terminal[0] - terminal[1]))
    d2 = float(np.linalg.norm(terminal[1] - terminal[2]))
    if d1 < 1e-13 * scale or d2 < 1e-14 * scale:
        return EXACT
    return math.log2(d1 / d2)
