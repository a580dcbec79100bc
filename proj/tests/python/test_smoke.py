import os

import pytest

import wormnc


def fixture(name):
    root = os.environ.get(
        "WORMNC_FIXTURE_DIR",
        os.path.join(os.path.dirname(__file__), "..", "..", "fixtures"),
    )
    return os.path.join(root, name)


@pytest.fixture(scope="module")
def chain():
    return wormnc.load_config(fixture("backpressure_chain.json"))


def test_load_and_validate(chain):
    assert chain.flow_count == 3
    assert wormnc.validate(chain) == []
    assert chain.flow_ids() == [1, 2, 3]


def test_xy_route(chain):
    path = wormnc.xy_route(chain, (0, 0), (2, 0))
    assert path == [(0, 0, "E"), (1, 0, "E"), (2, 0, "L")]


def test_analyze_reference_value(chain):
    report = wormnc.analyze(chain, method="bata")
    row = report["rows"][0]
    assert row["flow_id"] == 1
    direct = row["t_path"] + row["t_hp"] + row["t_sp"] + row["t_lp"]
    assert abs(direct - 7.368421053) < 1e-9
    assert abs(row["t_ib"] - 6.235457064) < 1e-9


def test_methods_differ_on_bursty_traffic():
    cfg = wormnc.load_config(fixture("cpq_chain.json"))
    bata = wormnc.analyze(cfg, method="bata")
    gbata = wormnc.analyze(cfg, method="gbata")
    assert bata["rows"][0]["t_ib"] == 0.0
    assert gbata["rows"][0]["t_ib"] == 10.0
    assert gbata["rows"][0]["cpq_safe"]
    assert not bata["rows"][0]["cpq_safe"]


def test_graph_dot():
    cfg = wormnc.load_config(fixture("cpq_chain.json"))
    dot = wormnc.interference_graph_dot(cfg, 1)
    assert dot.count("->") == 4  # five vertices in a chain
    assert '"2:1+3" -> "1:0+4"' in dot


def test_simulation_within_bounds(chain):
    report = wormnc.analyze(chain, method="gbata")
    sweep = wormnc.tightness(chain, method="gbata", runs=20, seed=5, jobs=2)
    assert all(t <= 1.0 for t in sweep["tau"])
    sim = wormnc.simulate(chain, seed=3)
    for row in sim:
        assert row["flits_injected"] == row["flits_delivered"]
    assert report["rows"][0]["schedulable"]


def test_generator_roundtrip():
    cfg = wormnc.generate(paradigm="uniform", flows=4, width=6, height=6, seed=9)
    assert cfg.flow_count == 4
    again = wormnc.config_from_json(cfg.to_json())
    assert wormnc.validate(again) == []
