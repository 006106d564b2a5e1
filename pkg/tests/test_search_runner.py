import json
from pathlib import Path

import pytest

import detlab_cli
import search_runner
from replay_runner import replay, replay_trial
from report_summary import HISTOGRAM_LABELS, build_summary, load_records, summarize
from search_runner import (
    CORPUS_KIND,
    SearchConfig,
    count_trials,
    load_search_config,
    plan_trials,
    reproduce_trial,
    run_search,
    run_trial,
)
from utils.errors import ConfigError, MatrixParseError, ReportParseError
from utils.linalg_core import Tolerance
from utils.matrix_io import corpus_path

CONFIG_DIR = Path(__file__).resolve().parent.parent / "config"


def _config(tmp_path, **overrides):
    values = {"checks": ["thm1"], "dims": [2], "trials_per_cell": 10, "seed": 7, "out_path": str(tmp_path / "report")}
    values.update(overrides)
    return SearchConfig.from_dict(values)


def _without_wall_time(records):
    return [{k: v for k, v in record.items() if k != "wall_time"} for record in records]


class TestSearchConfig:
    def test_empty_dims(self, tmp_path):
        with pytest.raises(ConfigError):
            _config(tmp_path, dims=[])

    def test_empty_checks(self, tmp_path):
        with pytest.raises(ConfigError):
            _config(tmp_path, checks=[])

    def test_unknown_check(self, tmp_path):
        with pytest.raises(ConfigError):
            _config(tmp_path, checks=["thm99"])

    def test_invalid_grid_for_check(self, tmp_path):
        with pytest.raises(ConfigError):
            _config(tmp_path, checks=["conj2"], p_grid=[0.0, 1.0])

    def test_unknown_key(self, tmp_path):
        with pytest.raises(ConfigError):
            _config(tmp_path, trails=5)

    def test_zero_trials(self, tmp_path):
        with pytest.raises(ConfigError):
            _config(tmp_path, trials_per_cell=0)

    def test_sectioned_yaml_with_string_floats(self, tmp_path):
        path = tmp_path / "search.yaml"
        path.write_text(
            "general:\n"
            "  checks: [thm3, conj1]\n"
            "  dims: [2, 3]\n"
            "  trials_per_cell: 4\n"
            "sampler:\n"
            "  kinds: [wishart]\n"
            "  cond: 1e3\n"
            "grids:\n"
            "  p_grid: [0.5, 1e0]\n"
            "tolerance:\n"
            "  rel: 1e-9\n"
            "  abs: 1e-12\n"
        )
        config = load_search_config(path)
        assert config.checks == ["thm3", "conj1"]
        assert config.sampler_kinds == ["wishart"]
        assert config.cond == 1e3
        assert config.p_grid == [0.5, 1.0]
        assert config.tol == Tolerance(rel=1e-9, abs=1e-12)

    def test_json_config_and_overrides(self, tmp_path):
        path = tmp_path / "search.json"
        path.write_text(json.dumps({"checks": ["thm1"], "dims": [2], "trials_per_cell": 3}))
        config = load_search_config(path, {"trials_per_cell": 9, "seed": None})
        assert config.trials_per_cell == 9
        assert config.seed == 0

    @pytest.mark.parametrize("name", ["search_theorems.yaml", "search_conjectures.yaml",
                                      "search_boundary.yaml", "search_smoke.yaml"])
    def test_shipped_configs_load(self, name):
        config = load_search_config(CONFIG_DIR / name)
        assert count_trials(config) > 0

    def test_default_grids(self, tmp_path):
        config = _config(tmp_path, checks=["conj1", "conj2", "even_power"])
        assert config.grid_for("conj1") == [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0]
        assert config.grid_for("conj2") == [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0]
        assert config.grid_for("even_power") == [1, 2]
        assert config.grid_for("thm1") == [None]


class TestTrialPlan:
    def test_trial_count_and_order(self, tmp_path):
        config = _config(tmp_path, checks=["thm1", "conj1"], dims=[2, 3], p_grid=[1.0, 2.0], trials_per_cell=3)
        tasks = list(plan_trials(config))
        assert len(tasks) == count_trials(config) == 2 * 3 + 2 * 2 * 3
        assert [t["trial_index"] for t in tasks] == list(range(len(tasks)))

    def test_example_injected_in_first_trial(self, tmp_path):
        config = _config(tmp_path, checks=["conj1"], p_grid=[3.0], trials_per_cell=2)
        first, second = list(plan_trials(config))
        assert first["sampler_a"]["kind"] == CORPUS_KIND
        assert second["sampler_a"]["kind"] != CORPUS_KIND

    def test_injection_can_be_disabled(self, tmp_path):
        config = _config(tmp_path, checks=["conj1"], p_grid=[3.0], inject_example=False)
        assert all(t["sampler_a"]["kind"] != CORPUS_KIND for t in plan_trials(config))

    def test_sampler_kinds_rotate(self, tmp_path):
        config = _config(tmp_path, trials_per_cell=6, dims=[3])
        kinds = [t["sampler_a"]["kind"] for t in plan_trials(config)]
        assert kinds[:3] == ["wishart", "spectrum_controlled", "rank_deficient"]
        assert kinds[3:] == kinds[:3]

    def test_structural_error_becomes_warn(self, tmp_path):
        task = next(plan_trials(_config(tmp_path, checks=["thm3"], p_grid=[1.0], dims=[3])))
        task["params"] = {"p": -1.0}
        record = run_trial(task)
        assert record["verdict"] == "warn"
        assert "DomainError" in record["details"]["error"]
        assert record["margin"] is None


class TestRunSearch:
    def test_thm1_never_fails(self, tmp_path):
        report = run_search(_config(tmp_path, trials_per_cell=100))
        records = load_records(report.records_path)
        assert len(records) == 100
        assert not [r for r in records if r["verdict"] == "fail"]
        assert all(r["accuracy_warning"] for r in records if r["verdict"] == "warn")
        assert all(r["tol_used"] == Tolerance().to_dict() for r in records)
        check = report.summary["checks"]["thm1"]
        assert check["pass"] + check["warn"] == 100
        assert report.summary_path.exists()

    def test_full_rank_samplers_all_pass(self, tmp_path):
        report = run_search(_config(tmp_path, sampler_kinds=["wishart", "spectrum_controlled"], trials_per_cell=40))
        assert report.summary["checks"]["thm1"]["pass"] == 40

    def test_summary_min_margin_matches_records(self, tmp_path):
        report = run_search(_config(tmp_path, checks=["thm2", "eq5_logmaj"], t_grid=[0.5], trials_per_cell=8))
        records = load_records(report.records_path)
        for check_id, check in report.summary["checks"].items():
            margins = [r["margin"] for r in records if r["check_id"] == check_id]
            assert check["min_margin"] == min(margins)
            assert sum(check["histogram"].values()) == len(margins)
            assert list(check["histogram"]) == HISTOGRAM_LABELS

    def test_boundary_example_fails(self, tmp_path):
        report = run_search(_config(tmp_path, checks=["thm3"], p_grid=[3.0], trials_per_cell=3))
        first = load_records(report.records_path)[0]
        assert first["sampler_a"]["kind"] == CORPUS_KIND
        assert first["verdict"] == "fail"
        assert first["lhs"] == pytest.approx(100.0, rel=1e-6)
        assert first["rhs"] == pytest.approx(71.0, rel=1e-6)
        assert first["details"]["orientations"]["ab"]["holds"] is False
        assert report.summary["proven_failures"] == 0
        assert report.summary["boundary_witnesses"][0]["trial_index"] == 0

    def test_proven_range_has_no_failures(self, tmp_path):
        report = run_search(_config(tmp_path, checks=["thm3"], dims=[2, 3], p_grid=[0.0, 0.5, 1.0, 2.0],
                                    trials_per_cell=10))
        assert report.summary["checks"]["thm3"]["fail"] == 0

    def test_identical_configs_identical_records(self, tmp_path):
        config = dict(checks=["thm3", "conj2"], dims=[2, 3], p_grid=[0.5, 3.0], trials_per_cell=4)
        first = run_search(_config(tmp_path / "a", **config))
        second = run_search(_config(tmp_path / "b", **config))
        assert _without_wall_time(load_records(first.records_path)) == _without_wall_time(
            load_records(second.records_path)
        )

    def test_worker_count_does_not_change_records(self, tmp_path):
        config = dict(checks=["thm1", "conj1"], dims=[2, 3], p_grid=[1.5], trials_per_cell=5)
        serial = run_search(_config(tmp_path / "serial", workers=1, **config))
        parallel = run_search(_config(tmp_path / "parallel", workers=2, **config))
        assert _without_wall_time(load_records(serial.records_path)) == _without_wall_time(
            load_records(parallel.records_path)
        )

    def test_pool_is_fed_in_batches(self, tmp_path, monkeypatch):
        monkeypatch.setattr(search_runner, "TASK_BATCH_SIZE", 4)
        config = _config(tmp_path, workers=2, trials_per_cell=20)
        pulled = []

        def counted(tasks):
            for task in tasks:
                pulled.append(task["trial_index"])
                yield task

        records = search_runner._execute(config, counted(plan_trials(config)))
        first = next(records)
        assert len(pulled) <= 4
        indices = [first["trial_index"]] + [record["trial_index"] for record in records]
        assert indices == list(range(20))

    def test_records_reproduce_from_seed(self, tmp_path):
        report = run_search(_config(tmp_path, checks=["conj1", "conj2"], dims=[2, 4], p_grid=[1.5],
                                    trials_per_cell=4))
        for record in load_records(report.records_path):
            assert abs(reproduce_trial(record).margin - record["margin"]) <= 1e-12

    def test_unwritable_destination(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        with pytest.raises(OSError):
            run_search(_config(tmp_path, out_path=str(blocker / "report")))


class TestSummaryAndReplay:
    def _write(self, path, records):
        path.write_text("".join(json.dumps(r) + "\n" for r in records))
        return path

    def _record(self, index, check_id="thm1", verdict="pass", margin=0.1, proven=True):
        return {"trial_index": index, "seed": index + 1, "check_id": check_id, "verdict": verdict,
                "margin": margin, "proven": proven, "params": {}}

    def test_all_pass_exit_zero(self, tmp_path):
        text, code = summarize(self._write(tmp_path / "r.jsonl", [self._record(0), self._record(1)]))
        assert code == 0
        assert "thm1" in text

    def test_proven_failure_exit_one(self, tmp_path):
        records = [self._record(0), self._record(1, verdict="fail", margin=-0.5)]
        text, code = summarize(self._write(tmp_path / "r.jsonl", records))
        assert code == 1

    def test_failure_without_proven_flag_counts(self, tmp_path):
        path = tmp_path / "r.jsonl"
        path.write_text(json.dumps({"trial_index": 0, "check_id": "thm1", "verdict": "fail", "margin": -0.5}) + "\n")
        text, code = summarize(path)
        assert code == 1
        assert "❌ thm1" in text
        assert "No proven-statement failures" not in text

    @pytest.mark.parametrize("params, expected", [
        ({"p": 1.5}, 1),
        ({"p": 3.0}, 0),
        ({"p": 1.5, "orientation": "ab"}, 0),
    ])
    def test_thm3_failure_without_proven_flag(self, tmp_path, params, expected):
        record = {"trial_index": 0, "check_id": "thm3", "verdict": "fail", "margin": -0.5, "params": params}
        path = tmp_path / "r.jsonl"
        path.write_text(json.dumps(record) + "\n")
        assert summarize(path)[1] == expected

    def test_conjecture_failure_is_candidate_not_regression(self, tmp_path):
        records = [self._record(0, "conj1", "fail", -0.2, proven=False)]
        path = self._write(tmp_path / "r.jsonl", records)
        text, code = summarize(path)
        assert code == 0
        assert "Counterexample candidates: 1" in text
        assert build_summary(load_records(path))["counterexample_candidates"][0]["trial_index"] == 0

    def test_empty_report(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        text, code = summarize(path)
        assert code == 0
        assert "Records: 0" in text

    def test_min_margin_and_worst_seed(self, tmp_path):
        records = [self._record(0, margin=0.3), self._record(1, margin=0.01), self._record(2, margin=0.2)]
        summary = build_summary(load_records(self._write(tmp_path / "r.jsonl", records)))
        assert summary["checks"]["thm1"]["min_margin"] == 0.01
        assert summary["checks"]["thm1"]["worst_trial"] == 1
        assert summary["checks"]["thm1"]["worst_seed"] == 2

    def test_truncated_last_line_is_skipped(self, tmp_path):
        path = tmp_path / "r.jsonl"
        path.write_text(json.dumps(self._record(0)) + "\n" + '{"trial_index": 1, "che')
        assert len(load_records(path)) == 1

    def test_malformed_line_inside(self, tmp_path):
        path = tmp_path / "r.jsonl"
        path.write_text("not json\n" + json.dumps(self._record(1)) + "\n")
        with pytest.raises(ReportParseError):
            load_records(path)

    def test_missing_fields(self, tmp_path):
        path = tmp_path / "r.jsonl"
        path.write_text(json.dumps({"trial_index": 0}) + "\n")
        with pytest.raises(ReportParseError):
            load_records(path)

    def test_replay_example(self):
        result = replay(corpus_path("worked_example.json"), "thm3", {"p": 3.0})
        assert result.lhs == pytest.approx(100.0, rel=1e-6)
        assert result.rhs == pytest.approx(71.0, rel=1e-6)
        assert result.verdict.value == "fail"
        assert replay(corpus_path("worked_example.json"), "thm1").passed

    def test_replay_identity_pair(self, tmp_path):
        path = tmp_path / "identity.json"
        path.write_text(json.dumps({"A": {"n": 2, "rows": [[1, 0], [0, 1]]},
                                    "B": {"n": 2, "rows": [[1, 0], [0, 1]]}}))
        for check_id in ("thm1", "thm2", "thm4", "eq1_polar"):
            assert replay(path, check_id).margin == pytest.approx(0.0, abs=1e-8)

    def test_replay_malformed_pair(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"A": {"n": 2, "rows": [[1, 0], [0, 1]]}, "B": {"n": 2}}')
        with pytest.raises(MatrixParseError):
            replay(path, "thm1")

    def test_replay_trial_from_report(self, tmp_path):
        report = run_search(_config(tmp_path, checks=["conj2"], p_grid=[3.0], trials_per_cell=3))
        record, result, difference = replay_trial(report.records_path, 2)
        assert record["trial_index"] == 2
        assert difference <= 1e-12

    def test_replay_missing_trial(self, tmp_path):
        report = run_search(_config(tmp_path, trials_per_cell=2))
        with pytest.raises(ReportParseError):
            replay_trial(report.records_path, 99)


class TestCommandLine:
    def test_search_and_summarize(self, tmp_path, capsys):
        out = tmp_path / "cli"
        code = detlab_cli.main(["search", "--checks", "thm1,conj1", "--dims", "2,3", "--trials", "3",
                                "--seed", "7", "--p-grid", "0.5:2.0:0.5", "--out", str(out)])
        assert code == 0
        assert "SEARCH SUMMARY" in capsys.readouterr().out
        assert detlab_cli.main(["summarize", str(tmp_path / "cli.jsonl")]) == 0

    def test_replay_prints_json(self, capsys):
        code = detlab_cli.main(["replay", "--pair", str(corpus_path("worked_example.json")),
                                "--check", "thm3", "--p", "3"])
        assert code == 0
        output = json.loads(capsys.readouterr().out)
        assert output["verdict"] == "fail"
        assert output["lhs"] == pytest.approx(100.0, rel=1e-6)

    def test_bad_pair_exit_code(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{")
        assert detlab_cli.main(["replay", "--pair", str(path), "--check", "thm1"]) == 2

    def test_missing_report_exit_code(self, tmp_path):
        assert detlab_cli.main(["summarize", str(tmp_path / "missing.jsonl")]) == 2

    def test_empty_dims_exit_code(self, tmp_path):
        assert detlab_cli.main(["search", "--checks", "thm1", "--dims", "", "--out", str(tmp_path / "x")]) == 2

    @pytest.mark.parametrize("text, expected", [
        ("0.5:2.0:0.5", [0.5, 1.0, 1.5, 2.0]),
        ("0.25:1:0.25", [0.25, 0.5, 0.75, 1.0]),
        ("1,2.5,4", [1.0, 2.5, 4.0]),
    ])
    def test_parse_grid(self, text, expected):
        assert detlab_cli.parse_grid(text) == expected

    def test_parse_grid_rejects_bad_step(self):
        with pytest.raises(ConfigError):
            detlab_cli.parse_grid("1:0:0.5")
