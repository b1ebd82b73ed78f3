import json
import math
import os

import numpy as np
import pytest

kronopt = pytest.importorskip("kronopt")


def path3_slack_end():
    net = {
        "base_mva": 100.0,
        "buses": [
            {"id": 1, "injection_pu": 1.0, "is_slack": False},
            {"id": 2, "injection_pu": 0.0, "is_slack": False},
            {"id": 3, "injection_pu": -1.0, "is_slack": True},
        ],
        "branches": [
            {"from": 1, "to": 2, "x": 1.0},
            {"from": 2, "to": 3, "x": 1.0},
        ],
    }
    return kronopt.Network.from_json_text(json.dumps(net))


def path3_slack_middle():
    net = {
        "base_mva": 100.0,
        "buses": [
            {"id": 1, "injection_pu": 1.0, "is_slack": False},
            {"id": 2, "injection_pu": 0.0, "is_slack": True},
            {"id": 3, "injection_pu": -1.0, "is_slack": False},
        ],
        "branches": [
            {"from": 1, "to": 2, "x": 1.0},
            {"from": 2, "to": 3, "x": 1.0},
        ],
    }
    return kronopt.Network.from_json_text(json.dumps(net))


def test_dcpf_path3():
    net = path3_slack_end()
    theta = kronopt.solve_dc(net)
    assert np.allclose(theta, [2.0, 1.0, 0.0], atol=1e-12)
    flows = kronopt.branch_flows(net, theta)
    assert np.allclose(flows, [1.0, 1.0], atol=1e-12)


def test_json_roundtrip():
    net = path3_slack_end()
    again = kronopt.Network.from_json_text(net.to_json_text())
    assert again.to_json_text() == net.to_json_text()


def test_kron_exactness():
    net = path3_slack_end()
    B = kronopt.build_susceptance(net)
    theta = kronopt.solve_dc(net)
    keep = [0, 2]
    Bred = kronopt.kron_reduce(B, keep)
    Pred = kronopt.ward_injections(B, net.injections(), keep)
    red = kronopt.reduced_network(net, keep, Bred, Pred, 1)
    theta_red = kronopt.solve_dc(red)
    assert np.allclose(theta_red, theta[keep], atol=1e-12)


def test_communities_two_triangles():
    rows = [(1, 2), (2, 3), (1, 3), (4, 5), (5, 6), (4, 6), (3, 4)]
    net = {
        "base_mva": 100.0,
        "buses": [{"id": i, "injection_pu": 0.0, "is_slack": i == 1} for i in range(1, 7)],
        "branches": [{"from": a, "to": b, "x": 1.0} for a, b in rows],
    }
    net = kronopt.Network.from_json_text(json.dumps(net))
    adj = kronopt.adjacency_of(kronopt.build_susceptance(net))
    part = kronopt.detect_greedy(adj)
    assert part.k == 2
    assert abs(part.q - 5.0 / 14.0) < 1e-12


def test_reduce_path3():
    net = path3_slack_middle()
    params = kronopt.ReduceParams()
    params.alpha = 10.0
    params.q = 2
    params.method = "none"
    params.deterministic = True
    params.jobs = 1
    res = kronopt.reduce(net, params)
    assert res.keep == [1]
    assert res.optimal
    assert res.logs[0].eliminated == 2
    assert abs(res.logs[0].objective - (-19.0)) < 1e-6
    errs = kronopt.mice(net, res.reduced, res.omega, res.theta_hat)
    assert len(errs) == 1
    assert abs(errs[0] - 1.0) < 1e-9


def test_export_milp(tmp_path):
    net = path3_slack_middle()
    mps = tmp_path / "m.mps"
    cmap = tmp_path / "m.names.csv"
    kronopt.export_milp(net, str(mps), str(cmap), alpha=10.0, q=2)
    text = mps.read_text()
    assert text.startswith("NAME")
    assert "ENDATA" in text
    assert cmap.read_text().splitlines()[0] == "mps_name,semantic_name"


def test_big_m_band():
    assert abs(kronopt.choose_big_m(np.zeros(3)) - math.pi / 6) < 1e-12
    assert abs(kronopt.choose_big_m(np.array([2.0, 0.0])) - math.pi / 2) < 1e-12


def test_case_files_present_and_parse():
    data = os.environ.get("KRONOPT_DATA", "data")
    rts = kronopt.load_network(os.path.join(data, "rts96.m"))
    assert rts.n == 73
    theta = kronopt.solve_dc(rts)
    assert float(np.max(np.abs(theta))) <= 1.2
