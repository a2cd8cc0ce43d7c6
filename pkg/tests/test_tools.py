import asyncio
import json

import pytest
from fastmcp import FastMCP

from tools import analysis_tools, evolution_tools, povm_tools, scenario_tools, state_tools, transform_tools
from tools.session import SessionManager


def run(coro):
    return asyncio.run(coro)


@pytest.fixture
def session(quiet_config):
    mcp = FastMCP("test")
    manager = SessionManager()
    state_tools.register_state_tools(mcp, manager)
    transform_tools.register_transform_tools(mcp, manager)
    povm_tools.register_povm_tools(mcp, manager)
    evolution_tools.register_evolution_tools(mcp, manager)
    analysis_tools.register_analysis_tools(mcp, manager)
    scenario_tools.register_scenario_tools(mcp, manager)
    return manager


@pytest.fixture
def vacuum_state(session):
    result = run(state_tools.create_state("vac"))
    assert result["success"] is True
    return "vac"


def test_create_list_drop(session):
    created = run(state_tools.create_state("cat", kind="cat_position", separation=2.0))
    assert created["success"] is True
    assert created["norm"] == pytest.approx(1.0, abs=1e-12)
    assert created["grid"]["n"] == 128

    listed = run(state_tools.list_states())
    assert [s["name"] for s in listed["states"]] == ["cat"]
    assert listed["states"][0]["type"] == "DensityMatrix"

    assert run(state_tools.drop_state("cat"))["success"] is True
    assert run(state_tools.drop_state("cat"))["success"] is False


def test_create_state_reports_errors(session):
    result = run(state_tools.create_state("bad", kind="squeezed"))
    assert result["success"] is False
    assert result["error"] is True
    assert result["error_type"] == "ValidationError"
    assert "timestamp" in result


def test_unknown_source_is_an_error(session):
    result = run(transform_tools.to_wigner("nothing", "w"))
    assert result["success"] is False
    assert result["error_type"] == "StateError"


def test_transform_tools(session, vacuum_state):
    w = run(transform_tools.to_wigner(vacuum_state, "w"))
    assert w["field"]["integral"] == pytest.approx(1.0, abs=1e-10)
    q = run(transform_tools.to_husimi("w", "q"))
    assert q["field"]["max"] == pytest.approx(1.0 / (2.0 * 3.141592653589793), abs=1e-6)
    chi = run(transform_tools.to_characteristic("w", "chi"))
    assert "max_abs" in chi["field"]
    marg = run(transform_tools.wigner_marginals(vacuum_state))
    assert len(marg["position_density"]) == 128
    assert sum(marg["position_density"]) * 20.0 / 128 == pytest.approx(1.0, abs=1e-10)


def test_povm_tools(session, vacuum_state):
    prob = run(povm_tools.povm_probability_tool(vacuum_state))
    assert prob["probability"] == pytest.approx(1.0, abs=1e-10)

    applied = run(povm_tools.apply_povm_channel(vacuum_state, "after", m=1))
    assert applied["trace"] == pytest.approx(1.0, abs=1e-10)
    assert applied["purity"] < 1.0

    bad = run(povm_tools.apply_povm_channel(vacuum_state, "x", m=0))
    assert bad["error_type"] == "ParameterError"

    smooth = run(povm_tools.smooth_wigner(vacuum_state, "smooth", m=0.5))
    assert smooth["field"]["min"] >= -1e-12

    sampled = run(povm_tools.sample_povm(vacuum_state, n_samples=1, seed=2, target="post"))
    assert len(sampled["outcomes"]) == 1
    assert "post" in [s["name"] for s in session.describe()]

    many = run(povm_tools.sample_povm(vacuum_state, n_samples=50, seed=2))
    assert len(many["outcomes"]) == 50
    assert many["truncated"] is False


def test_evolution_tool(session, vacuum_state):
    result = run(evolution_tools.evolve_state(vacuum_state, "later", mode="phasespace", gamma=0.25, t=2.0))
    assert result["success"] is True
    assert result["var_x_change"] == pytest.approx(0.5, abs=1e-8)
    assert result["trace_drift"] == pytest.approx(0.0, abs=1e-10)

    bad = run(evolution_tools.evolve_state(vacuum_state, "x", mode="sideways", gamma=0.1, t=1.0))
    assert bad["success"] is False


def test_analysis_tools(session, vacuum_state, quiet_config):
    metrics = run(analysis_tools.analyze_state(vacuum_state))["metrics"]
    assert metrics["var_x"] == pytest.approx(0.5, abs=1e-10)
    assert metrics["density_purity"] == pytest.approx(1.0, abs=1e-10)

    same = run(analysis_tools.compare_states(vacuum_state, vacuum_state))
    assert same["l2"] == 0.0

    saved = run(analysis_tools.save_state(vacuum_state, "vac.csv", png=True))
    assert saved["success"] is True
    out_dir = quiet_config.parent / "out"
    assert (out_dir / "vac.csv").exists()
    assert (out_dir / "vac.png").exists()


def test_scenario_tools(session, tmp_path):
    listed = run(scenario_tools.list_scenarios())
    assert len(listed["scenarios"]) == 6

    path = tmp_path / "tiny.json"
    path.write_text(
        json.dumps(
            {
                "name": "tiny",
                "grid": {"n": 64, "half_width": 8.0},
                "initial_state": {"kind": "coherent"},
                "pipeline": [{"op": "analyze"}],
                "outputs": {"formats": ["json"]},
            }
        )
    )
    result = run(scenario_tools.run_named_scenario(str(path), str(tmp_path / "run")))
    assert result["success"] is True
    assert {a["kind"] for a in result["artifacts"]} == {"metrics_json"}

    missing = run(scenario_tools.run_named_scenario("fig9-nowhere"))
    assert missing["error_type"] == "ConfigError"


class RecordingServer:
    def __init__(self):
        self.tools = {}

    def tool(self, name, description):
        def register(fn):
            assert description
            self.tools[name] = fn
            return fn

        return register


def test_every_tool_is_registered_under_its_name():
    server = RecordingServer()
    manager = SessionManager()
    for module, register in [
        (state_tools, state_tools.register_state_tools),
        (transform_tools, transform_tools.register_transform_tools),
        (povm_tools, povm_tools.register_povm_tools),
        (evolution_tools, evolution_tools.register_evolution_tools),
        (analysis_tools, analysis_tools.register_analysis_tools),
        (scenario_tools, scenario_tools.register_scenario_tools),
    ]:
        register(server, manager)
        assert module.session_manager is manager
    assert sorted(server.tools) == sorted([
        "create_state", "list_states", "drop_state",
        "to_wigner", "to_husimi", "to_characteristic", "wigner_marginals",
        "povm_probability", "apply_povm_channel", "smooth_wigner", "sample_povm",
        "evolve_state",
        "analyze_state", "compare_states", "save_state",
        "list_scenarios", "run_named_scenario",
    ])
    assert server.tools["evolve_state"] is evolution_tools.evolve_state
    assert server.tools["povm_probability"] is povm_tools.povm_probability_tool
