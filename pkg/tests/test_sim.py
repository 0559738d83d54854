"""Scenario loading, scripted-user runs, invariants, and emission."""

import json
import math
import threading
import time

import pytest

from balancednews.config import AppConfig
from balancednews.corpusgen import write_bias_map_csv, write_corpus_jsonl
from balancednews.errors import ConfigError
from balancednews.events import MemoryEventLog
from balancednews.session import replay
from balancednews.sim import (
    CSV_FIELDS,
    RunRow,
    Scenario,
    UserModel,
    build_scenario_pools,
    emit,
    load_scenario,
    run_scenario,
    run_scenario_http,
    sample_click,
)

PRESETS = ("one_sided", "one_sided_long", "unconstrained", "mirror", "casual")


def scenario_with(**kwargs):
    defaults = dict(
        name="test",
        iterations=10,
        config=AppConfig(),
        user_preferred_type="liberal",
        user_click_prob=1.0,
        user_preference_strength=1.0,
        corpus="synthetic:400",
    )
    defaults.update(kwargs)
    return Scenario(**defaults)


class TestUserModel:
    def test_bad_probabilities(self, labels):
        with pytest.raises(ValueError, match="click_prob"):
            UserModel(preferred_type=labels[0], click_prob=1.5)
        with pytest.raises(ValueError, match="preference_strength"):
            UserModel(preferred_type=labels[0], preference_strength=-0.1)

    def test_never_clicks_when_prob_zero(self, labels, pools):
        from balancednews.session import create_session
        from random import Random

        state, _ = create_session("s", AppConfig(), 1, pools)
        model = UserModel(preferred_type=labels[0], click_prob=0.0)
        rng = Random("user:1")
        assert all(
            sample_click(model, state.unfiltered_page, rng) is None
            for _ in range(50)
        )

    def test_full_strength_always_hits_preferred(self, labels, pools):
        from balancednews.session import create_session
        from random import Random

        state, _ = create_session("s", AppConfig(), 1, pools)
        model = UserModel(preferred_type=labels[1], preference_strength=1.0)
        rng = Random("user:2")
        page = state.unfiltered_page
        for _ in range(30):
            clicked = sample_click(model, page, rng)
            assert page.find(clicked).type.index == 1

    def test_zero_strength_always_avoids_preferred(self, labels, pools):
        from balancednews.session import create_session
        from random import Random

        state, _ = create_session("s", AppConfig(), 1, pools)
        model = UserModel(preferred_type=labels[0], preference_strength=0.0)
        rng = Random("user:3")
        page = state.unfiltered_page
        for _ in range(30):
            clicked = sample_click(page=page, model=model, rng=rng)
            assert page.find(clicked).type.index != 0

    def test_absent_preferred_type_still_clicks(self, labels):
        from random import Random
        from balancednews.sim import _sample_from_slots

        model = UserModel(preferred_type=labels[0], preference_strength=1.0)
        slots = [("c1", 1), ("c2", 1), ("c3", 1)]
        rng = Random("user:4")
        picks = {_sample_from_slots(model, slots, rng) for _ in range(40)}
        assert picks <= {"c1", "c2", "c3"}
        assert len(picks) > 1


class TestScenarioLoading:
    @pytest.mark.parametrize("name", PRESETS)
    def test_packaged_presets_load(self, name):
        scenario = load_scenario(name)
        assert scenario.name == name
        assert scenario.iterations > 0
        scenario.config.validate()

    def test_load_from_path(self, tmp_path):
        path = tmp_path / "mine.json"
        path.write_text(
            json.dumps(
                {
                    "iterations": 4,
                    "user": {"preferred_type": "conservative", "click_prob": 0.5},
                    "corpus": "synthetic:50",
                }
            ),
            encoding="utf-8",
        )
        scenario = load_scenario(str(path))
        assert scenario.name == "mine"
        assert scenario.iterations == 4
        assert scenario.user_click_prob == 0.5

    def test_overrides(self):
        scenario = load_scenario("one_sided", overrides={"iterations": 3})
        assert scenario.iterations == 3

    def test_unknown_name(self):
        with pytest.raises(ConfigError, match="no scenario"):
            load_scenario("does-not-exist")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{nope", encoding="utf-8")
        with pytest.raises(ConfigError, match="not valid JSON"):
            load_scenario(str(path))

    def test_missing_user(self, tmp_path):
        path = tmp_path / "nouser.json"
        path.write_text("{}", encoding="utf-8")
        with pytest.raises(ConfigError, match="preferred_type"):
            load_scenario(str(path))

    def test_unknown_preferred_type(self, tmp_path):
        path = tmp_path / "badtype.json"
        path.write_text(
            json.dumps({"user": {"preferred_type": "centrist"}}), encoding="utf-8"
        )
        with pytest.raises(ConfigError, match="unknown type 'centrist'"):
            load_scenario(str(path))

    def test_unknown_config_key(self, tmp_path):
        path = tmp_path / "badcfg.json"
        path.write_text(
            json.dumps(
                {"config": {"learning": 2}, "user": {"preferred_type": "liberal"}}
            ),
            encoding="utf-8",
        )
        with pytest.raises(ConfigError, match="bad scenario config"):
            load_scenario(str(path))

    def test_unknown_click_feed(self, tmp_path):
        path = tmp_path / "badfeed.json"
        path.write_text(
            json.dumps(
                {"click_feed": "mixed", "user": {"preferred_type": "liberal"}}
            ),
            encoding="utf-8",
        )
        with pytest.raises(ConfigError, match="unknown click_feed"):
            load_scenario(str(path))


class TestBuildScenarioPools:
    def test_synthetic_sizes(self):
        pools = build_scenario_pools(scenario_with(corpus="synthetic:17"))
        assert [len(pool) for pool in pools] == [17, 17]

    def test_file_corpus_requires_bias_map(self):
        with pytest.raises(ConfigError, match="bias_map"):
            build_scenario_pools(scenario_with(corpus="somewhere.jsonl"))

    def test_file_corpus_roundtrip(self, tmp_path):
        from balancednews.corpusgen import make_records

        corpus = tmp_path / "c.jsonl"
        bias = tmp_path / "m.csv"
        write_corpus_jsonl(make_records(6), corpus)
        write_bias_map_csv(bias)
        pools = build_scenario_pools(
            scenario_with(corpus=str(corpus), bias_map=str(bias))
        )
        assert [len(pool) for pool in pools] == [6, 6]


class TestRunScenario:
    def test_deterministic_for_equal_seeds(self):
        scenario = scenario_with(iterations=15)
        first = run_scenario(scenario, 5)
        second = run_scenario(scenario, 5)
        assert first == second

    def test_seed_changes_trajectory(self):
        scenario = scenario_with(iterations=15, user_preference_strength=0.6)
        assert run_scenario(scenario, 1).rows != run_scenario(scenario, 2).rows

    def test_row_shape(self):
        scenario = scenario_with(iterations=8)
        result = run_scenario(scenario, 3)
        assert len(result.rows) == 9
        assert result.rows[0].t == 0
        assert result.rows[0].clicked_type == ""
        assert [row.t for row in result.rows] == list(range(9))
        assert result.summary.iterations == 8
        assert result.summary.clicks == 8
        assert result.summary.final_pct_balanced == result.rows[-1].pct_lib_balanced

    def test_no_click_user_never_learns(self):
        scenario = scenario_with(iterations=6, user_click_prob=0.0)
        result = run_scenario(scenario, 3)
        assert result.summary.clicks == 0
        assert all(row.clicked_type == "" for row in result.rows)
        assert {row.pct_lib_unfiltered for row in result.rows} == {0.5}

    def test_event_log_replays_to_same_state(self):
        scenario = scenario_with(iterations=12, user_preference_strength=0.7)
        log = MemoryEventLog()
        pools = build_scenario_pools(scenario)
        result = run_scenario(scenario, 9, log=log, pools=pools)
        session_id = f"sim-{scenario.name}-9"
        records = log.read(session_id)
        state = replay(records, pools)
        assert state.t == 12
        assert state.history[-1].pct_liberal_balanced == result.rows[-1].pct_lib_balanced

    def test_iterations_override(self):
        scenario = scenario_with(iterations=50)
        result = run_scenario(scenario, 1, iterations=2)
        assert len(result.rows) == 3


class TestCapContact:
    def test_balanced_never_exceeds_cap_after_first_touch(self):
        # deterministic liberal clicker under default bounds: once the
        # balanced share first reaches floor(0.8*K)/K it may dip but
        # never exceed it afterward
        scenario = scenario_with(iterations=30)
        cap = math.floor(0.8 * 10) / 10
        for seed in range(10):
            result = run_scenario(scenario, seed)
            shares = [row.pct_lib_balanced for row in result.rows]
            hit = next((i for i, s in enumerate(shares) if s == cap), None)
            assert hit is not None
            assert all(s <= cap + 1e-12 for s in shares[hit:])
            assert result.summary.first_cap_contact is not None
            assert result.summary.first_cap_contact <= hit

    def test_unconstrained_scenario_reaches_extreme(self):
        scenario = load_scenario("unconstrained", overrides={"iterations": 40})
        result = run_scenario(scenario, 7)
        assert max(row.pct_lib_unfiltered for row in result.rows) == 1.0


class TestMirrorSymmetry:
    def test_type_order_reversal_mirrors_trajectories(self):
        # same seeds, types listed in the opposite order, user and bounds
        # swapped along: every share, bound, and click must mirror exactly
        shared = dict(
            iterations=25,
            user_click_prob=1.0,
            user_preference_strength=0.8,
            corpus="synthetic:400",
            lower_liberal=0.1,
            upper_liberal=0.45,
        )
        forward = scenario_with(
            config=AppConfig(type_names=("liberal", "conservative")),
            user_preferred_type="liberal",
            **shared,
        )
        reverse = scenario_with(
            config=AppConfig(type_names=("conservative", "liberal")),
            user_preferred_type="conservative",
            **shared,
        )
        swap = {"liberal": "conservative", "conservative": "liberal", "": ""}
        for seed in (1, 7, 42):
            rows_f = run_scenario(forward, seed).rows
            rows_r = run_scenario(reverse, seed).rows
            assert len(rows_f) == len(rows_r)
            for a, b in zip(rows_f, rows_r):
                assert a.pct_lib_unfiltered == b.pct_lib_unfiltered
                assert a.pct_lib_balanced == b.pct_lib_balanced
                assert (a.lower, a.upper) == (b.lower, b.upper)
                assert swap[a.clicked_type] == b.clicked_type


class TestStatisticalSanity:
    def test_no_drift_without_signal(self):
        # strength 0.5 on a two-type page carries no information, so the
        # unfiltered share averaged over 200 seeds must stay near half
        scenario = scenario_with(
            iterations=50, user_preference_strength=0.5, corpus="synthetic:700"
        )
        pools = build_scenario_pools(scenario)
        mean = (
            sum(
                run_scenario(scenario, seed, pools=pools).rows[-1].pct_lib_unfiltered
                for seed in range(200)
            )
            / 200
        )
        assert 0.4 <= mean <= 0.6


class TestEmit:
    def test_csv_layout_and_determinism(self, tmp_path):
        scenario = scenario_with(iterations=5)
        result = run_scenario(scenario, 11)
        first = emit(result, tmp_path / "a.csv", "csv")
        second = emit(result, tmp_path / "b.csv", "csv")
        a, b = first.read_bytes(), second.read_bytes()
        assert a == b
        header = a.decode("utf-8").splitlines()[0]
        assert header == ",".join(CSV_FIELDS)
        assert len(a.decode("utf-8").splitlines()) == 7

    def test_jsonl_rows(self, tmp_path):
        scenario = scenario_with(iterations=4)
        result = run_scenario(scenario, 2)
        path = emit(result, tmp_path / "r.jsonl", "jsonl")
        lines = path.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 5
        row = json.loads(lines[0])
        assert list(row) == list(CSV_FIELDS)

    def test_unknown_format(self, tmp_path):
        result = run_scenario(scenario_with(iterations=1), 1)
        with pytest.raises(ValueError, match="unknown format"):
            emit(result, tmp_path / "x.xml", "xml")

    def test_missing_directory(self, tmp_path):
        result = run_scenario(scenario_with(iterations=1), 1)
        with pytest.raises(FileNotFoundError):
            emit(result, tmp_path / "nope" / "x.csv", "csv")

    def test_failure_leaves_existing_file_intact(self, tmp_path):
        result = run_scenario(scenario_with(iterations=2), 1)
        target = tmp_path / "keep.jsonl"
        target.write_text("precious\n", encoding="utf-8")
        broken = result.rows[0].__class__(
            t=0,
            pct_lib_unfiltered=0.5,
            pct_lib_balanced=0.5,
            lower=0.2,
            upper=0.8,
            clicked_type=object(),  # json refuses this
        )
        bad = result.__class__(
            scenario=result.scenario,
            seed=result.seed,
            rows=(broken,),
            summary=result.summary,
        )
        with pytest.raises(TypeError):
            emit(bad, target, "jsonl")
        assert target.read_text(encoding="utf-8") == "precious\n"
        assert list(tmp_path.glob("*.tmp")) == []


class TestHttpDriver:
    def test_matches_in_process_run_over_real_wire(self):
        import uvicorn

        from balancednews.service import create_app
        from balancednews.session import SessionStore

        scenario = scenario_with(iterations=8, user_preference_strength=0.7)
        pools = build_scenario_pools(scenario)
        store = SessionStore(pools, scenario.config, MemoryEventLog())
        config = uvicorn.Config(
            create_app(store), host="127.0.0.1", port=0, log_level="warning"
        )
        server = uvicorn.Server(config)
        thread = threading.Thread(target=server.run, daemon=True)
        thread.start()
        try:
            deadline = time.time() + 10
            while not server.started:
                if time.time() > deadline:
                    raise RuntimeError("server did not start")
                time.sleep(0.01)
            port = server.servers[0].sockets[0].getsockname()[1]
            over_http = run_scenario_http(
                scenario, 21, f"http://127.0.0.1:{port}"
            )
        finally:
            server.should_exit = True
            thread.join(timeout=10)

        in_process = run_scenario(scenario, 21, pools=pools)
        assert over_http.rows == in_process.rows
        assert over_http.summary.clicks == in_process.summary.clicks
