import json

import pytest

pbnrl = pytest.importorskip("pbnrl")


def test_fixtures_are_valid():
    for name in pbnrl.fixture_names():
        assert pbnrl.validate_network(pbnrl.fixture_network(name)) == []


def test_ten_node_attractors():
    result = pbnrl.attractors(pbnrl.fixture_network("n10"))
    assert result["attractor_count"] == 3


def test_transition_rows_sum_to_one():
    net = pbnrl.fixture_network("n7")
    total = sum(pbnrl.transition_probability(net, "1001001", format(b, "07b")) for b in range(128))
    assert total == pytest.approx(1.0, abs=1e-9)


def test_simulation_is_seeded():
    net = pbnrl.fixture_network("n10")
    a = pbnrl.simulate(net, steps=50, seed=3)
    assert a == pbnrl.simulate(net, steps=50, seed=3)
    assert len(a) == 51
    assert all(len(s) == 10 for s in a)


def test_exact_and_monte_carlo_ssd_agree():
    net = {
        "name": "noisy",
        "n_nodes": 3,
        "nodes": [
            {"inputs": [2, 3], "stochastic_table": [0.1, 0.7, 0.6, 0.95]},
            {"inputs": [1], "stochastic_table": [0.2, 0.8]},
            {"inputs": [1, 2], "stochastic_table": [0.9, 0.3, 0.4, 0.1]},
        ],
    }
    exact = pbnrl.exact_ssd(net)
    assert sum(exact) == pytest.approx(1.0, abs=1e-9)
    mc = pbnrl.monte_carlo_ssd(net, runs=50, steps=4000, seed=1)
    l1 = sum(abs(exact[i] - mc.get(format(i, "03b"), 0.0)) for i in range(8))
    assert l1 < 0.02


def test_train_and_sweep():
    config = pbnrl.preset("n10-attractor")
    config["schedule"] = {"type": "episodic", "n_epochs": 1, "episodes_per_epoch": 20}
    net = pbnrl.fixture_network("n10")
    task = pbnrl.fixture_task("n10")
    checkpoint, metrics = pbnrl.train(net, task, config)
    assert checkpoint["format"] == "pbnrl-qnetwork"
    assert metrics.splitlines()[0].startswith("epoch")
    report = pbnrl.success_sweep(net, task, checkpoint, attempts=1)
    assert 0.0 <= report["success_rate"] <= 1.0


def test_infer_from_expression():
    rows = ["gene," + ",".join(f"s{i}" for i in range(40))]
    a = [float(i % 2) * 4 + 1 for i in range(40)]
    rows.append("A," + ",".join(str(v) for v in a))
    rows.append("B," + ",".join(str(v + 0.1) for v in a))
    model = pbnrl.infer("\n".join(rows) + "\n", ["A", "B"])
    assert model["n_nodes"] == 2
    assert pbnrl.validate_network(model) == []


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        pbnrl.preset("no-such-preset")
    with pytest.raises(ValueError):
        pbnrl.transition_probability(pbnrl.fixture_network("n7"), "101", "111")
    bad = json.loads(json.dumps(pbnrl.fixture_network("n7")))
    bad["nodes"][0]["functions"][0]["p"] = 0.5
    assert pbnrl.validate_network(bad)
