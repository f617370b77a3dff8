"""
命令行测试
"""

import json

import pytest

from src.main import EXIT_ANALYSIS_ERROR, EXIT_OK, EXIT_USAGE_ERROR, cli
from src.record.csv_io import LABELS_FILE, load_labels, save_csv, save_labels
from src.record.ctg_record import BinaryLabel


pytestmark = pytest.mark.integration


@pytest.fixture
def trace_csv(tmp_path, make_record):
    return save_csv(make_record(record_id="flat"), tmp_path / "flat.csv")


def _stdout_json(capsys):
    return json.loads(capsys.readouterr().out)


class TestAnalyze:
    """analyze 子命令"""

    def test_rules_verdict_on_stdout(self, trace_csv, capsys):
        assert cli(["analyze", str(trace_csv), "--backend", "rules"]) == EXIT_OK

        result = _stdout_json(capsys)
        assert result["record_id"] == "flat"
        assert result["overall"]["class"] == "pathological"
        assert len(result["features"]) == 5

    def test_direct_mode_with_outputs(self, trace_csv, tmp_path, capsys):
        code = cli([
            "analyze", str(trace_csv), "--mode", "direct",
            "--json", str(tmp_path / "out" / "verdict.json"),
            "--svg", str(tmp_path / "out" / "flat.svg"),
            "--png", str(tmp_path / "out" / "flat.png"),
        ])

        assert code == EXIT_OK
        result = _stdout_json(capsys)
        assert result["features_omitted"] is True
        saved = json.loads((tmp_path / "out" / "verdict.json").read_text(encoding="utf-8"))
        assert saved == result
        assert (tmp_path / "out" / "flat.svg").is_file()
        assert (tmp_path / "out" / "flat.png").is_file()

    def test_short_record_is_analysis_error(self, tmp_path, make_record, capsys):
        path = save_csv(make_record(duration_s=300.0), tmp_path / "short.csv")
        assert cli(["analyze", str(path)]) == EXIT_ANALYSIS_ERROR
        assert "TooShortError" in capsys.readouterr().err

    def test_missing_csv_is_usage_error(self, tmp_path):
        assert cli(["analyze", str(tmp_path / "absent.csv")]) == EXIT_USAGE_ERROR

    def test_unknown_flag(self, trace_csv):
        assert cli(["analyze", str(trace_csv), "--speed", "3"]) == EXIT_USAGE_ERROR

    def test_config_file(self, trace_csv, fixtures_dir, capsys):
        config = fixtures_dir / "configs" / "valid_rules_config.json"
        assert cli(["--config", str(config), "analyze", str(trace_csv)]) == EXIT_OK
        assert _stdout_json(capsys)["mode"] == "multi"

    def test_malformed_config_is_usage_error(self, trace_csv, tmp_path):
        config = tmp_path / "broken.json"
        config.write_text("{", encoding="utf-8")
        assert cli(["--config", str(config), "analyze", str(trace_csv)]) == EXIT_USAGE_ERROR

    def test_invalid_config_is_analysis_error(self, trace_csv, fixtures_dir):
        config = fixtures_dir / "configs" / "invalid_agent_url_config.json"
        assert cli(["--config", str(config), "analyze", str(trace_csv)]) == EXIT_ANALYSIS_ERROR


class TestEval:
    """eval 子命令"""

    def test_missing_labels_file(self, trace_csv, capsys):
        assert cli(["eval", str(trace_csv.parent)]) == EXIT_USAGE_ERROR
        assert LABELS_FILE in capsys.readouterr().err

    def test_report(self, trace_csv, tmp_path, capsys):
        save_labels({"flat": BinaryLabel.ABNORMAL}, tmp_path / LABELS_FILE)

        code = cli(["eval", str(tmp_path), "--trials", "2", "--out", str(tmp_path / "report.json")])

        assert code == EXIT_OK
        report = _stdout_json(capsys)
        assert report["trials"] == 2
        assert report["mean_accuracy"] == 1.0
        assert (tmp_path / "report.json").is_file()

    def test_missing_directory(self, tmp_path):
        assert cli(["eval", str(tmp_path / "nowhere")]) == EXIT_USAGE_ERROR


class TestSynth:
    """synth 子命令"""

    def test_random_scenarios(self, tmp_path, capsys):
        out = tmp_path / "synth"
        assert cli(["synth", "--random", "3", "--seed", "1", "--out", str(out)]) == EXIT_OK

        result = _stdout_json(capsys)
        assert result["records"] == ["synth_000001", "synth_000002", "synth_000003"]
        assert sorted(load_labels(out / LABELS_FILE)) == result["records"]
        assert (out / "synth_000002.csv").is_file()

    def test_scenario_file(self, tmp_path, fixtures_dir):
        scenario = fixtures_dir / "scenarios" / "late_deceleration.json"
        assert cli(["synth", "--scenario", str(scenario), "--out", str(tmp_path)]) == EXIT_OK
        assert load_labels(tmp_path / LABELS_FILE) == {"late_decel": BinaryLabel.ABNORMAL}

    def test_overlapping_scenario(self, tmp_path, fixtures_dir, capsys):
        scenario = fixtures_dir / "scenarios" / "overlapping_accelerations.json"
        assert cli(["synth", "--scenario", str(scenario), "--out", str(tmp_path)]) == EXIT_ANALYSIS_ERROR
        assert "OverlapError" in capsys.readouterr().err

    def test_source_is_required(self, tmp_path):
        assert cli(["synth", "--out", str(tmp_path)]) == EXIT_USAGE_ERROR


class TestRender:
    """render 子命令"""

    def test_svg(self, trace_csv, tmp_path):
        out = tmp_path / "flat.svg"
        assert cli(["render", str(trace_csv), "--out", str(out)]) == EXIT_OK
        assert out.read_text(encoding="utf-8").startswith("<?xml")

    def test_png_by_suffix(self, trace_csv, tmp_path):
        out = tmp_path / "flat.png"
        assert cli(["render", str(trace_csv), "--out", str(out)]) == EXIT_OK
        assert out.read_bytes()[:4] == b"\x89PNG"


class TestDefaultSampleRate:
    """没有 t_s 列的轨迹按配置的采样率读取"""

    @pytest.fixture
    def untimed_csv(self, tmp_path):
        path = tmp_path / "untimed.csv"
        rows = ["fhr_bpm,uc"] + ["140,10"] * 1600
        path.write_text("\n".join(rows) + "\n", encoding="utf-8")
        return path

    @pytest.fixture
    def two_hz_config(self, tmp_path):
        path = tmp_path / "two_hz.json"
        path.write_text(json.dumps({"preprocess": {"default_sample_rate_hz": 2.0}}), encoding="utf-8")
        return path

    def test_builtin_rate_makes_record_too_short(self, untimed_csv, capsys):
        # 1600 个样本按 4 Hz 只有 400 秒
        assert cli(["analyze", str(untimed_csv)]) == EXIT_ANALYSIS_ERROR
        assert "TooShortError" in capsys.readouterr().err

    def test_configured_rate_is_used_by_analyze(self, untimed_csv, two_hz_config, capsys):
        assert cli(["--config", str(two_hz_config), "analyze", str(untimed_csv)]) == EXIT_OK
        assert _stdout_json(capsys)["record_id"] == "untimed"

    def test_configured_rate_sets_render_width(self, untimed_csv, two_hz_config, tmp_path):
        out = tmp_path / "untimed.svg"
        code = cli(["--config", str(two_hz_config), "render", str(untimed_csv), "--out", str(out)])

        assert code == EXIT_OK
        # 800 秒 = 13.33 分钟 × 40 px
        assert 'width="533.33"' in out.read_text(encoding="utf-8")

    def test_configured_rate_is_used_by_eval(self, untimed_csv, two_hz_config, capsys):
        save_labels({"untimed": BinaryLabel.NORMAL}, untimed_csv.parent / LABELS_FILE)
        code = cli(["--config", str(two_hz_config), "eval", str(untimed_csv.parent), "--trials", "1"])

        assert code == EXIT_OK
        records = _stdout_json(capsys)["per_trial"][0]["records"]
        assert [r["record_id"] for r in records] == ["untimed"]
        assert "error" not in records[0]
