"""Experiment configuration: versioned JSON schema, validation, builders."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from jsonschema import Draft202012Validator

from .graph import Graph, is_connected
from .linsys import StateSpace, first_order
from .network import ClosedLoop, build_controller_network, network_interconnect, pair_interconnect
from .plant import (NonlinearPlant, PendulumParams, StorageFunction,
                    controller_storage, pendulum_plant, pendulum_storage, ss_plant)
from .sim import IntegratorConfig


class ConfigError(ValueError):
    """Invalid experiment configuration; message carries field diagnostics."""


_NUMBER = {"type": "number"}
_MATRIX = {"type": "array", "items": {"type": "array", "items": _NUMBER, "minItems": 1},
           "minItems": 1}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "mode", "plant", "controller", "delta",
                 "initial_conditions", "integrator"],
    "additionalProperties": False,
    "properties": {
        "schema": {"const": 1},
        "label": {"type": "string"},
        "mode": {"enum": ["pair", "network"]},
        "graph": {
            "type": "object",
            "required": ["n", "edges"],
            "additionalProperties": False,
            "properties": {
                "n": {"type": "integer", "minimum": 1},
                "edges": {"type": "array",
                          "items": {"type": "array", "items": {"type": "integer"},
                                    "minItems": 2, "maxItems": 2}},
            },
        },
        "plant": {
            "type": "object",
            "required": ["pendulum"],
            "additionalProperties": False,
            "properties": {
                "pendulum": {
                    "type": "object",
                    "required": ["m", "l", "kappa", "g"],
                    "additionalProperties": False,
                    "properties": {"m": {"type": "number", "exclusiveMinimum": 0},
                                   "l": {"type": "number", "exclusiveMinimum": 0},
                                   "kappa": {"type": "number", "exclusiveMinimum": 0},
                                   "g": {"type": "number", "exclusiveMinimum": 0}},
                },
            },
        },
        "controller": {
            "type": "object",
            "oneOf": [
                {"required": ["first_order"], "additionalProperties": False,
                 "properties": {"first_order": {
                     "type": "object", "required": ["a", "b"],
                     "additionalProperties": False,
                     "properties": {"a": {"type": "number", "exclusiveMinimum": 0},
                                    "b": {"type": "number", "exclusiveMinimum": 0}}}}},
                {"required": ["A", "B", "C"], "additionalProperties": False,
                 "properties": {"A": _MATRIX, "B": _MATRIX, "C": _MATRIX, "D": _MATRIX}},
            ],
        },
        "delta": {"type": "number", "exclusiveMinimum": 0},
        "initial_conditions": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "plants": {"type": "array", "items": {"type": "array", "items": _NUMBER}},
                "controllers": {"type": "array", "items": {"type": "array", "items": _NUMBER}},
                "plant": {"type": "array", "items": _NUMBER},
                "controller": {"type": "array", "items": _NUMBER},
            },
        },
        "integrator": {
            "type": "object",
            "required": ["step_s", "t_end_s"],
            "additionalProperties": False,
            "properties": {"step_s": {"type": "number", "exclusiveMinimum": 0},
                           "t_end_s": {"type": "number", "exclusiveMinimum": 0},
                           "record_every": {"type": "integer", "minimum": 1}},
        },
        "checks": {"type": "array", "items": {"type": "string"}},
        "consensus": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"rel": {"type": "number", "exclusiveMinimum": 0},
                           "abs": {"type": "number", "exclusiveMinimum": 0}},
        },
        "gamma": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"lo": _NUMBER, "hi": _NUMBER,
                           "count": {"type": "integer", "minimum": 2},
                           "network_samples": {"type": "integer", "minimum": 1},
                           "seed": {"type": "integer"}},
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"dir": {"type": "string"}},
        },
    },
}

DEFAULT_CHECKS_NETWORK = ["ni_dissipation", "osni_dissipation", "osni_like_network",
                          "lyapunov_monotone", "consensus"]
DEFAULT_CHECKS_PAIR = ["ni_dissipation", "osni_dissipation", "lyapunov_monotone"]


@dataclass
class ExperimentConfig:
    """Fully resolved experiment: systems built, dimensions checked."""

    raw: dict
    mode: str
    graph: Graph | None
    plant: NonlinearPlant
    plant_storage: StorageFunction | None
    controller_ss: StateSpace
    controller_storage: StorageFunction | None
    delta: float
    x0: np.ndarray
    integrator: IntegratorConfig
    checks: list
    consensus_rel: float = 0.02
    consensus_abs: float = 0.05
    out_dir: str | None = None
    label: str = "experiment"

    def build_loop(self) -> ClosedLoop:
        if self.mode == "network":
            net = build_controller_network(self.controller_ss, self.graph)
            return network_interconnect(self.plant, net)
        return pair_interconnect(self.plant, ss_plant(self.controller_ss))


def graph_from_config(entry: dict) -> Graph:
    try:
        return Graph(int(entry["n"]), frozenset(tuple(e) for e in entry["edges"]))
    except ValueError as err:
        raise ConfigError(f"graph: {err}") from err


def statespace_from_config(entry: dict) -> StateSpace:
    try:
        if "first_order" in entry:
            fo = entry["first_order"]
            return first_order(fo["a"], fo["b"])
        return StateSpace(entry["A"], entry["B"], entry["C"], entry.get("D"))
    except ValueError as err:
        raise ConfigError(f"controller: {err}") from err


def plant_from_config(entry: dict):
    params = entry["pendulum"]
    pp = PendulumParams(m_kg=params["m"], l_m=params["l"],
                        kappa=params["kappa"], g_ms2=params["g"])
    return pendulum_plant(pp), pendulum_storage(pp)


def _controller_storage_from_config(entry: dict):
    if "first_order" in entry:
        fo = entry["first_order"]
        return controller_storage(fo["a"], fo["b"])
    return None  # no closed-form storage for a general realisation


def resolve_config(doc: dict) -> ExperimentConfig:
    """Validate a parsed JSON document and build every referenced object."""
    errors = sorted(Draft202012Validator(SCHEMA).iter_errors(doc),
                    key=lambda e: e.json_path)
    if errors:
        e = errors[0]
        raise ConfigError(f"{e.json_path}: {e.message}")
    mode = doc["mode"]
    plant, plant_storage = plant_from_config(doc["plant"])
    controller = statespace_from_config(doc["controller"])
    ics = doc["initial_conditions"]
    if mode == "network":
        if "graph" not in doc:
            raise ConfigError("$.graph: network mode requires a graph")
        graph = graph_from_config(doc["graph"])
        if not is_connected(graph):
            raise ConfigError("$.graph: consensus requires a connected graph")
        if "plants" not in ics or "controllers" not in ics:
            raise ConfigError("$.initial_conditions: network mode needs "
                              "'plants' and 'controllers' lists")
        xp = np.asarray(ics["plants"], dtype=float)
        xc = np.asarray(ics["controllers"], dtype=float)
        if xp.shape != (graph.n, plant.p):
            raise ConfigError(f"$.initial_conditions.plants: expected shape "
                              f"({graph.n}, {plant.p}), got {list(xp.shape)}")
        if xc.shape != (graph.n, controller.state_dim):
            raise ConfigError(f"$.initial_conditions.controllers: expected shape "
                              f"({graph.n}, {controller.state_dim}), got {list(xc.shape)}")
        x0 = np.concatenate([xp.reshape(-1), xc.reshape(-1)])
        default_checks = DEFAULT_CHECKS_NETWORK
    else:
        graph = graph_from_config(doc["graph"]) if "graph" in doc else None
        if "plant" not in ics or "controller" not in ics:
            raise ConfigError("$.initial_conditions: pair mode needs "
                              "'plant' and 'controller' vectors")
        xp = np.asarray(ics["plant"], dtype=float)
        xc = np.asarray(ics["controller"], dtype=float)
        if xp.shape != (plant.p,):
            raise ConfigError(f"$.initial_conditions.plant: expected length {plant.p}")
        if xc.shape != (controller.state_dim,):
            raise ConfigError("$.initial_conditions.controller: expected length "
                              f"{controller.state_dim}")
        x0 = np.concatenate([xp, xc])
        default_checks = DEFAULT_CHECKS_PAIR
    integ = doc["integrator"]
    try:
        integrator = IntegratorConfig(step_s=integ["step_s"], t_end_s=integ["t_end_s"],
                                      record_every=integ.get("record_every", 1))
    except ValueError as err:
        raise ConfigError(f"$.integrator: {err}") from err
    consensus = doc.get("consensus", {})
    return ExperimentConfig(
        raw=doc,
        mode=mode,
        graph=graph,
        plant=plant,
        plant_storage=plant_storage,
        controller_ss=controller,
        controller_storage=_controller_storage_from_config(doc["controller"]),
        delta=float(doc["delta"]),
        x0=x0,
        integrator=integrator,
        checks=list(doc.get("checks", default_checks)),
        consensus_rel=float(consensus.get("rel", 0.02)),
        consensus_abs=float(consensus.get("abs", 0.05)),
        out_dir=doc.get("output", {}).get("dir"),
        label=doc.get("label", "experiment"),
    )


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError as err:
        raise ConfigError(f"config file not found: {path}") from err
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}:{err.lineno}:{err.colno}: {err.msg}") from err
    return resolve_config(doc)
