import pytest

import wellsep


def test_lp_closed_form():
    r = wellsep.solve_lp(3, 0.1)
    assert r["feasible"]
    assert r["primal_objective"] == pytest.approx(0.5 + 0.1 * 2 / 3, abs=1e-9)
    assert r["duality_gap"] < 1e-9


def test_graph_roundtrip():
    g = wellsep.Graph(4, [(0, 1), (1, 2), (2, 3)])
    assert g.order == 4 and g.edge_count == 3
    assert g.neighbors(1) == [0, 2]
    assert g.adjacent(2, 3) and not g.adjacent(0, 3)


def test_brute_force_and_verify():
    path = wellsep.Graph(3, [(0, 1), (1, 2)])
    tri = wellsep.Graph(3, [(0, 1), (0, 2), (1, 2)])
    phi = wellsep.brute_force_embed(path, tri)
    assert phi is not None
    ok, _ = wellsep.verify_embedding(path, tri, phi)
    assert ok
    assert wellsep.brute_force_embed(tri, path) is None


def test_factor_on_k4():
    k4 = wellsep.Graph(4, [(u, v) for u in range(4) for v in range(u + 1, 4)])
    f = wellsep.find_kfactor(k4, 2)
    assert f is not None and len(f["cliques"]) == 2


def test_generated_h_has_witness():
    h, sep = wellsep.generate_h({"family": "grid", "n": 40, "rows": 4}, seed=1)
    assert h.order == 40
    assert sep is not None and "S" in sep


def test_pipeline_trial_embeds():
    cell = {"host": {"clusters": 4, "cluster_size": 50}, "params": {"k": 2},
            "h": {"family": "component-union", "shape": "path", "component_size": 20}}
    rec = wellsep.run_cell_trial(cell, 11)
    assert rec["success"]
    host = wellsep.generate_host({"clusters": 4, "cluster_size": 50, "seed": 0}, 0)
    assert host.order == 200


def test_bad_spec_is_argument_error():
    with pytest.raises(wellsep.ArgumentError):
        wellsep.generate_h({"family": "no-such-family"})
    with pytest.raises(wellsep.WellsepError):
        wellsep.Graph(2, [(0, 0)])
