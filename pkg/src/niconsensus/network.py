"""Closed-loop interconnections and composite storage functions.

Two layouts are supported:

* pair mode: one nonlinear plant and one (possibly linear, wrapped) plant in
  positive feedback, u1 = y2 and u2 = y1;
* network mode: n identical plants, each driven by the output of a bank of n
  identical linear controllers whose per-node outputs are mixed by the graph
  Laplacian. Controller i integrates dxc_i = A xc_i + B y1_i locally and the
  i-th network output is sum_j a_ij (C xc_i - C xc_j), i.e. the mixing sits
  at the controller outputs. This makes the difference states xc_i - xc_j
  literal copies of the single-controller dynamics, which is what the
  edge-wise dissipation checks rely on.

Composite state layout: all plant states first, node by node, then all
controller states node by node.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from .graph import Graph, is_connected, laplacian
from .linsys import StateSpace, is_hurwitz, kron_ss
from .plant import NonlinearPlant, StorageFunction


@dataclass(frozen=True)
class ControllerNetwork:
    """n identical strictly proper controllers with Laplacian-mixed outputs."""

    node_controller: StateSpace
    graph: Graph

    def __post_init__(self):
        if np.any(self.node_controller.D != 0):
            raise ValueError("network controllers must be strictly proper (D = 0)")
        object.__setattr__(self, "_L", laplacian(self.graph))

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def state_dim(self) -> int:
        return self.n * self.node_controller.state_dim

    @property
    def io_dim(self) -> int:
        return self.n * self.node_controller.io_dim

    def node_states(self, xc_flat):
        return np.asarray(xc_flat).reshape(self.n, self.node_controller.state_dim)

    def deriv(self, xc_flat, u2_flat):
        """Stacked dxc_i = A xc_i + B u2_i."""
        sysm = self.node_controller
        xc = self.node_states(xc_flat)
        u2 = np.asarray(u2_flat).reshape(self.n, sysm.io_dim)
        return (xc @ sysm.A.T + u2 @ sysm.B.T).reshape(-1)

    def node_outputs(self, xc_flat):
        """Per-node outputs C xc_i, stacked (n, m)."""
        return self.node_states(xc_flat) @ self.node_controller.C.T

    def network_output(self, xc_flat):
        """Laplacian-mixed output: row i is sum_j a_ij (C xc_i - C xc_j)."""
        return self._L @ self.node_outputs(xc_flat)

    def as_statespace(self) -> StateSpace:
        """The equivalent transfer matrix L (x) M(s) as one realisation."""
        return kron_ss(self._L, self.node_controller)


def build_controller_network(m_sys: StateSpace, g: Graph) -> ControllerNetwork:
    """Per-node copies of m_sys with outputs mixed by the graph Laplacian."""
    if not is_hurwitz(m_sys):
        raise ValueError("controller network requires a Hurwitz node controller")
    if not is_connected(g):
        warnings.warn("controller network graph is not connected", stacklevel=2)
    return ControllerNetwork(node_controller=m_sys, graph=g)


@dataclass(frozen=True)
class LoopSignals:
    """Every signal of a closed loop evaluated at one composite state.

    Flat arrays of length n*m: plant inputs u1, plant outputs y1 and their
    exact rates, per-node controller outputs yc and rates, mixed controller
    outputs y2 and rates. In pair mode n = 1 and y2 coincides with yc.
    """

    dstate: np.ndarray
    u1: np.ndarray
    y1: np.ndarray
    y1dot: np.ndarray
    yc: np.ndarray
    ycdot: np.ndarray
    y2: np.ndarray
    y2dot: np.ndarray


class ClosedLoop:
    """Positive feedback interconnection, pair or network mode.

    The composite vector field is a pure function of the composite state;
    instances hold no mutable simulation state and may be shared freely.
    """

    def __init__(self, plants, controller, graph=None, mode="network"):
        self.mode = mode
        self.plants = tuple(plants)
        self.controller = controller
        self.graph = graph
        if mode == "pair":
            h1, h2 = self.plants[0], controller
            self.n_plants = 1
            self._split = h1.p
            self.n_states = h1.p + h2.p
            self.io_dim = h1.m
        elif mode == "network":
            plant = self.plants[0]
            self.n_plants = controller.n
            self._split = self.n_plants * plant.p
            self.n_states = self._split + controller.state_dim
            self.io_dim = plant.m
        else:
            raise ValueError(f"unknown mode {mode!r}")

    def plant_state_slice(self, i: int) -> slice:
        p = self.plants[0].p
        return slice(i * p, (i + 1) * p)

    def ctrl_state_slice(self, i: int) -> slice:
        q = (self.controller.p if self.mode == "pair"
             else self.controller.node_controller.state_dim)
        return slice(self._split + i * q, self._split + (i + 1) * q)

    def split(self, X):
        """(plant states as (n, p), controller states flat)."""
        X = np.asarray(X, dtype=float)
        return X[:self._split].reshape(self.n_plants, self.plants[0].p), X[self._split:]

    def rhs(self, X):
        """Composite derivative; the lean path used inside the integrator."""
        xp, xc = self.split(X)
        if self.mode == "pair":
            h1, h2 = self.plants[0], self.controller
            x1, x2 = xp[0], xc
            y1, y2 = h1.h(x1), h2.h(x2)
            return np.concatenate([h1.f(x1, y2), h2.f(x2, y1)])
        net = self.controller
        y2 = net.network_output(xc)
        n, p = self.n_plants, self.plants[0].p
        dxp = np.empty((n, p))
        y1 = np.empty((n, self.io_dim))
        for i in range(n):
            dxp[i] = self.plants[i].f(xp[i], y2[i])
            y1[i] = self.plants[i].h(xp[i])
        dxc = net.deriv(xc, y1.reshape(-1))
        return np.concatenate([dxp.reshape(-1), dxc])

    def evaluate(self, X) -> LoopSignals:
        """Derivative plus every loop signal, all from exact chain rules."""
        xp, xc = self.split(X)
        if self.mode == "pair":
            h1, h2 = self.plants[0], self.controller
            x1, x2 = xp[0], xc
            y1, y2 = h1.h(x1), h2.h(x2)
            dx1, dx2 = h1.f(x1, y2), h2.f(x2, y1)
            y1dot = h1.dh(x1) @ dx1
            y2dot = h2.dh(x2) @ dx2
            return LoopSignals(dstate=np.concatenate([dx1, dx2]),
                               u1=y2, y1=y1, y1dot=y1dot,
                               yc=y2, ycdot=y2dot, y2=y2, y2dot=y2dot)
        net = self.controller
        m = self.io_dim
        yc = net.node_outputs(xc)
        y2 = net._L @ yc
        n, p = self.n_plants, self.plants[0].p
        dxp = np.empty((n, p))
        y1 = np.empty((n, m))
        y1dot = np.empty((n, m))
        for i in range(n):
            plant = self.plants[i]
            dxp[i] = plant.f(xp[i], y2[i])
            y1[i] = plant.h(xp[i])
            y1dot[i] = plant.dh(xp[i]) @ dxp[i]
        dxc = net.deriv(xc, y1.reshape(-1))
        ycdot = net.node_states(dxc) @ net.node_controller.C.T
        y2dot = net._L @ ycdot
        return LoopSignals(dstate=np.concatenate([dxp.reshape(-1), dxc]),
                           u1=y2.reshape(-1), y1=y1.reshape(-1),
                           y1dot=y1dot.reshape(-1), yc=yc.reshape(-1),
                           ycdot=ycdot.reshape(-1), y2=y2.reshape(-1),
                           y2dot=y2dot.reshape(-1))


def pair_interconnect(h1: NonlinearPlant, h2: NonlinearPlant) -> ClosedLoop:
    """Positive feedback pair: u1 = y2, u2 = y1, no external reference."""
    if h1.m != h2.m:
        raise ValueError("plant and controller input/output dimensions differ")
    return ClosedLoop(plants=[h1], controller=h2, mode="pair")


def network_interconnect(plant: NonlinearPlant, net: ControllerNetwork) -> ClosedLoop:
    """n plant copies driven by the Laplacian-mixed controller bank."""
    if not is_connected(net.graph):
        raise ValueError("consensus requires a connected graph")
    if plant.m != net.node_controller.io_dim:
        raise ValueError("plant and controller input/output dimensions differ")
    return ClosedLoop(plants=[plant] * net.n, controller=net,
                      graph=net.graph, mode="network")


class CompositeStorage:
    """Candidate Lyapunov function of a closed loop.

    Pair mode:      W = V1(x1) + V2(x2) - y1 . y2
    Network mode:   W = sum_i V1(xp_i)
                        + (1/2) sum_ij a_ij V2(xc_i - xc_j)
                        - Y1 . Y2
    The ordered double sum counts each edge twice, which the 1/2 compensates.
    ``rate`` differentiates W along the loop vector field with exact storage
    gradients and output chain rules.
    """

    def __init__(self, loop: ClosedLoop, v1: StorageFunction, v2: StorageFunction):
        self.loop = loop
        self.v1 = v1
        self.v2 = v2
        if loop.mode == "network":
            self._edges = loop.graph.edge_list

    def value(self, X) -> float:
        loop = self.loop
        xp, xc = loop.split(X)
        if loop.mode == "pair":
            y1 = loop.plants[0].h(xp[0])
            y2 = loop.controller.h(xc)
            return self.v1.V(xp[0]) + self.v2.V(xc) - float(y1 @ y2)
        net = loop.controller
        xcn = net.node_states(xc)
        total = sum(self.v1.V(xp[i]) for i in range(loop.n_plants))
        for i, j in self._edges:
            d = xcn[i] - xcn[j]
            total += 0.5 * (self.v2.V(d) + self.v2.V(-d))
        y1 = np.concatenate([loop.plants[i].h(xp[i]) for i in range(loop.n_plants)])
        y2 = net.network_output(xc).reshape(-1)
        return float(total - y1 @ y2)

    def rate(self, X) -> float:
        loop = self.loop
        xp, xc = loop.split(X)
        sig = loop.evaluate(X)
        dxp = sig.dstate[:loop._split].reshape(loop.n_plants, loop.plants[0].p)
        dxc = sig.dstate[loop._split:]
        cross = float(sig.y1dot @ sig.y2 + sig.y1 @ sig.y2dot)
        if loop.mode == "pair":
            return (float(self.v1.grad(xp[0]) @ dxp[0])
                    + float(self.v2.grad(xc) @ dxc) - cross)
        net = loop.controller
        xcn = net.node_states(xc)
        dxcn = net.node_states(dxc)
        total = sum(float(self.v1.grad(xp[i]) @ dxp[i]) for i in range(loop.n_plants))
        for i, j in self._edges:
            d = xcn[i] - xcn[j]
            dd = dxcn[i] - dxcn[j]
            total += 0.5 * float(self.v2.grad(d) @ dd - self.v2.grad(-d) @ dd)
        return total - cross


def composite_storage(loop: ClosedLoop, v1: StorageFunction,
                      v2: StorageFunction) -> CompositeStorage:
    return CompositeStorage(loop, v1, v2)


@dataclass(frozen=True)
class PositivityReport:
    """Sampled lower bound of a composite storage over a box."""

    min_value: float
    argmin: np.ndarray
    samples: int
    passed: bool


def storage_positivity_scan(cs: CompositeStorage, lo, hi, samples: int = 20000,
                            seed: int = 0) -> PositivityReport:
    """Evaluate the storage at Halton points in the box [lo, hi].

    Passes when the sampled minimum is positive outside a 1e-8 ball around
    the origin. Sampling cannot prove positive definiteness; the report is
    advisory and callers are expected to proceed (with a warning) on failure.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    dim = cs.loop.n_states
    if lo.shape != (dim,) or hi.shape != (dim,):
        raise ValueError(f"box bounds must have length {dim}")
    if np.any(lo > 0) or np.any(hi < 0):
        raise ValueError("scan box must contain the origin")
    points = lo + qmc.Halton(d=dim, seed=seed).random(samples) * (hi - lo)
    best_val, best_x, counted = math.inf, None, 0
    for x in points:
        if np.linalg.norm(x) <= 1e-8:
            continue
        counted += 1
        w = cs.value(x)
        if w < best_val:
            best_val, best_x = w, x
    return PositivityReport(min_value=float(best_val), argmin=best_x,
                            samples=counted, passed=best_val > 0)
