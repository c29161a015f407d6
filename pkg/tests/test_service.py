import pytest
from fastapi.testclient import TestClient

from coinwalk import __version__
from coinwalk.service.app import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


class TestHealth:
    def test_healthz(self, client):
        body = client.get("/healthz").json()
        assert body == {"status": "ok", "version": __version__}


class TestWalkEndpoint:
    def test_exact_walk(self, client):
        r = client.post("/v1/walk", json={"steps": 3})
        assert r.status_code == 200
        body = r.json()
        probs = dict(zip(body["distribution"]["positions"], body["distribution"]["probabilities"]))
        assert probs[-3] == pytest.approx(1 / 8)
        assert probs[1] == pytest.approx(3 / 8)
        assert body["stats"]["std_dev"] > 0
        assert "conditional_coin0" not in body  # excluded when not requested

    def test_conditionals_and_flip(self, client):
        r = client.post("/v1/walk", json={"steps": 6, "conditionals": True,
                                          "pre_measurement_flip": True})
        body = r.json()
        assert body["conditional_coin0"]["probabilities"] == body["conditional_coin1"]["probabilities"]

    def test_noisy_walk_total_one(self, client):
        r = client.post("/v1/walk", json={"steps": 10, "noise": {"p": 0.9}})
        assert r.json()["distribution"]["total"] == pytest.approx(1.0, abs=1e-10)

    def test_trajectory_walk_requires_seed(self, client):
        r = client.post("/v1/walk", json={"steps": 5, "trajectories": 10})
        assert r.status_code == 422

    def test_trajectory_walk_runs(self, client):
        r = client.post("/v1/walk", json={"steps": 8, "noise": {"p": 0.9},
                                          "trajectories": 50, "seed": 1})
        assert r.status_code == 200
        assert r.json()["distribution"]["total"] == pytest.approx(1.0, abs=1e-10)

    def test_conditionals_rejected_for_trajectories(self, client):
        r = client.post("/v1/walk", json={"steps": 5, "trajectories": 10, "seed": 1,
                                          "conditionals": True})
        assert r.status_code == 400

    def test_circle_topology(self, client):
        r = client.post("/v1/walk", json={"steps": 20, "topology": {"kind": "circle", "size": 8}})
        assert r.status_code == 200
        assert len(r.json()["distribution"]["positions"]) == 8

    def test_unknown_field_rejected(self, client):
        r = client.post("/v1/walk", json={"steps": 5, "stepz": 7})
        assert r.status_code == 422


class TestBoundedEndpoint:
    def test_bounded_with_classical(self, client):
        r = client.post("/v1/bounded", json={"steps": 40, "barriers": [-3],
                                             "include_classical": True})
        body = r.json()
        q, c = body["quantum"], body["classical"]
        assert q["steps"] == list(range(1, 41))
        assert q["cumulative"][-1] + q["survival"] == pytest.approx(1.0, abs=1e-10)
        assert c["cumulative"][-1] > q["cumulative"][-1]

    def test_barrier_on_start_rejected(self, client):
        r = client.post("/v1/bounded", json={"steps": 10, "barriers": [0]})
        assert r.status_code == 422


class TestClassicalEndpoint:
    def test_distribution_mode(self, client):
        r = client.post("/v1/classical", json={"steps": 2})
        probs = dict(zip(r.json()["distribution"]["positions"],
                         r.json()["distribution"]["probabilities"]))
        assert probs == {-2: 0.25, 0: 0.5, 2: 0.25}

    def test_absorption_mode(self, client):
        r = client.post("/v1/classical", json={"steps": 10, "barriers": [-1]})
        body = r.json()
        assert body["absorption"]["cumulative"][0] == 0.5
        assert "distribution" not in body


class TestSampleEndpoint:
    def test_deterministic_for_seed(self, client):
        req = {"steps": 8, "shots": 200, "seed": 3, "noise": {"p": 0.9}}
        a = client.post("/v1/sample", json=req).json()
        b = client.post("/v1/sample", json=req).json()
        assert a == b
        assert a["shots"] == 200

    def test_seed_required(self, client):
        r = client.post("/v1/sample", json={"steps": 8, "shots": 10})
        assert r.status_code == 422


class TestPresetEndpoints:
    def test_list(self, client):
        assert client.get("/v1/presets").json()["presets"] == ["fig1", "fig2", "fig3", "fig4"]

    def test_get_one(self, client):
        cfg = client.get("/v1/presets/fig4").json()
        assert cfg["kind"] == "bounded"
        assert cfg["barriers"] == [-10]

    def test_unknown_is_404(self, client):
        assert client.get("/v1/presets/fig9").status_code == 404


class TestExperimentsEndpoint:
    def test_runs_config(self, client):
        r = client.post("/v1/experiments", json={"kind": "walk", "steps": [4, 6]})
        body = r.json()
        assert [c["name"] for c in body["curves"]] == ["n4_ideal", "n6_ideal"]
        assert body["package_version"] == __version__
        # config round-trips through the wire
        assert body["config"]["steps"] == [4, 6]

    def test_validation_error_lists_fields(self, client):
        r = client.post("/v1/experiments", json={"kind": "sample", "steps": [5]})
        assert r.status_code == 422
        detail = r.json()["detail"]
        assert any("trajectories" in d["msg"] for d in detail)

    def test_float_fidelity_through_wire(self, client):
        # JSON serialization must not lose a single bit of the computed doubles
        from coinwalk.experiments import ExperimentConfig, run_experiment

        r = client.post("/v1/experiments", json={"kind": "walk", "steps": [3]})
        wire_rows = [tuple(row) for row in r.json()["curves"][0]["rows"]]
        local_rows = run_experiment(ExperimentConfig(steps=[3])).curves[0].rows
        assert wire_rows == local_rows
