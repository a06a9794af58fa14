"""Probabilistic Boolean network simulation, analysis and DDQN control."""

import json

from . import _pbnrl
from ._pbnrl import InputError, StateSpaceTooLarge, fixture_names, preset_names

__all__ = [
    "InputError",
    "StateSpaceTooLarge",
    "attractors",
    "exact_ssd",
    "fixture_names",
    "fixture_network",
    "fixture_task",
    "infer",
    "monte_carlo_ssd",
    "preset",
    "preset_names",
    "simulate",
    "success_sweep",
    "train",
    "transition_probability",
    "validate_network",
]


def _text(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def fixture_network(name):
    return json.loads(_pbnrl.fixture_network(name))


def fixture_task(name):
    return json.loads(_pbnrl.fixture_task(name))


def preset(name):
    return json.loads(_pbnrl.preset(name))


def validate_network(network):
    """List of rule violations; empty when the network is usable."""
    return _pbnrl.validate_network(_text(network))


def transition_probability(network, state, next_state):
    return _pbnrl.transition_probability(_text(network), state, next_state)


def simulate(network, initial="", steps=100, seed=0):
    """Trajectory of bit strings, node 1 first, including the initial state."""
    return _pbnrl.simulate(_text(network), initial, steps, seed)


def attractors(network, occupancy_runs=0, max_steps=10000, seed=0):
    return json.loads(_pbnrl.attractors(_text(network), occupancy_runs, max_steps, seed))


def exact_ssd(network):
    """Dense steady-state vector indexed by the integer state encoding."""
    return _pbnrl.exact_ssd(_text(network))


def monte_carlo_ssd(network, runs=300, steps=4000, burn_in=0, seed=0):
    return dict(_pbnrl.monte_carlo_ssd(_text(network), runs, steps, burn_in, seed))


def train(network, task, config):
    """Returns (checkpoint dict, metrics CSV text)."""
    checkpoint, metrics = _pbnrl.train(_text(network), _text(task), _text(config))
    return json.loads(checkpoint), metrics


def success_sweep(network, task, checkpoint, horizon=0, attempts=10, sample_states=10000, seed=0):
    report = _pbnrl.success_sweep(
        _text(network), _text(task), _text(checkpoint), horizon, attempts, sample_states, seed
    )
    return json.loads(report)


def infer(expression_csv, genes, max_inputs=3, min_cod_gain=0.05, alpha=0.0):
    return json.loads(_pbnrl.infer(expression_csv, list(genes), max_inputs, min_cod_gain, alpha))
