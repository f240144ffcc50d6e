from __future__ import annotations

import json

import pytest

from vadkit.cli import load_config, main
from vadkit.core import ConfigError


class TestConfigFile:
    def test_toml_values_loaded(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text(
            'stride = 8\nwindow_seconds = 5.0\nneighbors = 3\n'
            'impersonation = false\npooling = "single:cap-a"\n'
            'captioner_models = ["cap-a", "cap-b"]\n'
        )
        config = load_config(path, {})
        assert config.stride == 8
        assert config.window_seconds == 5.0
        assert config.neighbors == 3
        assert config.impersonation is False
        assert config.pooling == "single:cap-a"
        assert config.captioner_models == ("cap-a", "cap-b")

    def test_cli_flags_override_file(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text("stride = 8\n")
        config = load_config(path, {"stride": 4, "neighbors": None})
        assert config.stride == 4
        assert config.neighbors == 10  # default kept for None overrides

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text("strude = 8\n")
        with pytest.raises(ConfigError):
            load_config(path, {})


class TestCliCommands:
    def test_run_command(self, demo_fixture, tmp_path, capsys):
        code = main(
            [
                "run",
                "--manifest", str(demo_fixture),
                "--cache", str(tmp_path / "cache"),
                "--out", str(tmp_path / "out"),
                "--workers", "2",
            ]
        )
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["roc_auc"] == 1.0
        assert (tmp_path / "out" / "report.json").exists()

    def test_run_flags_change_fingerprint(self, demo_fixture, tmp_path, capsys):
        main(
            [
                "run", "--manifest", str(demo_fixture),
                "--cache", str(tmp_path / "c1"), "--k", "3",
            ]
        )
        fp_k3 = json.loads(capsys.readouterr().out)["config_fingerprint"]
        main(
            [
                "run", "--manifest", str(demo_fixture),
                "--cache", str(tmp_path / "c2"), "--k", "5",
            ]
        )
        fp_k5 = json.loads(capsys.readouterr().out)["config_fingerprint"]
        assert fp_k3 != fp_k5

    def test_evaluate_command(self, demo_fixture, tmp_path, capsys):
        main(
            [
                "run",
                "--manifest", str(demo_fixture),
                "--cache", str(tmp_path / "cache"),
                "--out", str(tmp_path / "out"),
            ]
        )
        capsys.readouterr()
        fixture_dir = demo_fixture.parent
        code = main(
            [
                "evaluate",
                "--scores", str(tmp_path / "out" / "scores"),
                "--annotations", str(fixture_dir / "annotations.txt"),
            ]
        )
        assert code == 0
        result = json.loads(capsys.readouterr().out)
        assert result["roc_auc"] == 1.0

    def test_sweep_command_components(self, demo_fixture, tmp_path, capsys):
        code = main(
            [
                "sweep", "--axis", "components",
                "--manifest", str(demo_fixture),
                "--cache", str(tmp_path / "cache"),
            ]
        )
        assert code == 0
        table = json.loads(capsys.readouterr().out)
        assert [row["setting"] for row in table] == [
            "skip-cleaning", "skip-summary", "skip-refinement", "full",
        ]
        assert len({row["config_fingerprint"] for row in table}) == 4

    def test_sweep_command_k_values(self, demo_fixture, tmp_path, capsys):
        code = main(
            [
                "sweep", "--axis", "k",
                "--manifest", str(demo_fixture),
                "--cache", str(tmp_path / "cache"),
                "--k-values", "1,2",
            ]
        )
        assert code == 0
        table = json.loads(capsys.readouterr().out)
        assert [row["setting"] for row in table] == ["k=1", "k=2"]

    def test_baseline_zs_command(self, demo_fixture, tmp_path, capsys):
        code = main(
            [
                "baseline", "zs", "--modality", "image",
                "--manifest", str(demo_fixture),
                "--out", str(tmp_path / "zs"),
            ]
        )
        assert code == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["baseline"] == "zs_image"
        assert (tmp_path / "zs" / "report.json").exists()

    def test_errors_exit_nonzero(self, tmp_path, capsys):
        code = main(
            [
                "run",
                "--manifest", str(tmp_path / "missing.json"),
                "--cache", str(tmp_path / "cache"),
            ]
        )
        assert code == 1
        assert "error:" in capsys.readouterr().err
