import json

import numpy as np
import pytest

from z2ladder.cli import main
from z2ladder.config import EXPERIMENT_KINDS, ExperimentConfig, config_template
from z2ladder.errors import ConfigError
from z2ladder.results import read_csv
from z2ladder.runner import run_experiment


def small_base_config(**overrides):
    params = dict(experiment="base-dynamics", seed=5, length=9,
                  times=[1.0, 10.0], n_realizations=32, workers=1)
    params.update(overrides)
    return ExperimentConfig.from_dict(params)


class TestConfig:
    def test_round_trip(self):
        config = small_base_config()
        again = ExperimentConfig.from_json(config.to_json())
        assert again == config

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown config keys: rho_vv"):
            ExperimentConfig.from_dict({"experiment": "base-dynamics",
                                        "rho_vv": 0.5})

    def test_invalid_density_names_field(self):
        with pytest.raises(ConfigError, match="rho_v"):
            ExperimentConfig.from_dict({"experiment": "base-dynamics",
                                        "rho_v": 1.5})

    def test_defaults_match_headline_parameters(self):
        config = ExperimentConfig(experiment="base-dynamics")
        assert config.length == 25
        assert config.hopping == 1.0
        assert config.dephasing == 0.5
        assert config.rho_v == 0.5
        assert config.times == [1.0, 100.0]
        assert config.n_realizations == 10240

    def test_templates_are_valid_configs(self):
        for kind in EXPERIMENT_KINDS:
            template = config_template(kind)
            config = ExperimentConfig.from_dict(template)
            assert config.experiment == kind

    def test_schema_version_checked(self):
        with pytest.raises(ConfigError, match="schema_version"):
            ExperimentConfig.from_dict({"experiment": "base-dynamics",
                                        "schema_version": 99})


class TestRunner:
    def test_base_run_writes_csv_and_sidecar(self, tmp_path):
        info = run_experiment(small_base_config(), output_dir=tmp_path)
        csv_path = info["outputs"][0]
        meta, header, rows = read_csv(csv_path)
        assert header[:3] == ["time", "msd", "msd_stderr"]
        assert len(rows) == 2
        assert meta["params"]["rho_v"] == 0.5
        sidecar = json.loads(info["sidecar"].read_text())
        assert sidecar["config"]["experiment"] == "base-dynamics"
        assert sidecar["library_version"]

    def test_worker_count_does_not_change_bytes(self, tmp_path):
        run_experiment(small_base_config(n_realizations=96, output="w1"),
                       output_dir=tmp_path)
        run_experiment(small_base_config(n_realizations=96, workers=2,
                                         output="w2"), output_dir=tmp_path)
        body1 = (tmp_path / "w1.csv").read_bytes()
        body2 = (tmp_path / "w2.csv").read_bytes()
        assert body1 == body2

    def test_env_outdir_override(self, tmp_path, monkeypatch):
        monkeypatch.setenv("Z2LADDER_OUTDIR", str(tmp_path / "enviro"))
        info = run_experiment(small_base_config())
        assert info["outputs"][0].parent == tmp_path / "enviro"

    def test_spectra_run(self, tmp_path):
        config = ExperimentConfig.from_dict({
            "experiment": "spectra", "model": "z2", "lam": 1.0,
            "hop_half": 0.1525, "parity": "both"})
        info = run_experiment(config, output_dir=tmp_path)
        meta, header, rows = read_csv(info["outputs"][0])
        assert header == ["sector", "level", "energy", "gp"]
        odd = [r for r in rows if r[0] == "odd"]
        assert len(odd) == 4
        np.testing.assert_allclose(sorted(r[2] for r in odd),
                                   [-0.305, 0.0, 0.0, 0.305], atol=1e-9)

    def test_analytic_run(self, tmp_path):
        config = ExperimentConfig.from_dict({
            "experiment": "analytic", "length": 9, "times": [0.0, 1.0],
            "cutoff": 40})
        info = run_experiment(config, output_dir=tmp_path)
        names = {p.name for p in info["outputs"]}
        assert names == {"analytic_density.csv", "analytic_msd.csv"}

    def test_dwave_run(self, tmp_path):
        config = ExperimentConfig.from_dict({
            "experiment": "dwave-feasibility", "hop_half": 0.31, "lam": 0.67})
        info = run_experiment(config, output_dir=tmp_path)
        report = json.loads(info["outputs"][0].read_text())
        assert report["feasible"] is False
        assert report["hop_half_ghz"] == pytest.approx(0.1426)


class TestCli:
    def write_config(self, tmp_path, **overrides):
        data = dict(experiment="base-dynamics", seed=5, length=9,
                    times=[1.0, 10.0], n_realizations=16)
        data.update(overrides)
        path = tmp_path / "config.json"
        path.write_text(json.dumps(data))
        return path

    def test_run_subcommand(self, tmp_path, capsys):
        path = self.write_config(tmp_path)
        code = main(["run", str(path), "--out", str(tmp_path),
                     "--no-figures"])
        assert code == 0
        assert (tmp_path / "base-dynamics.csv").exists()
        assert (tmp_path / "base-dynamics.meta.json").exists()

    def test_run_renders_figures(self, tmp_path):
        path = self.write_config(tmp_path)
        code = main(["run", str(path), "--out", str(tmp_path)])
        assert code == 0
        assert (tmp_path / "base-dynamics_msd.png").exists()
        assert (tmp_path / "base-dynamics_profile.png").exists()

    def test_invalid_config_exits_2(self, tmp_path, capsys):
        path = self.write_config(tmp_path, rho_v=1.5)
        code = main(["run", str(path), "--no-figures"])
        assert code == 2
        assert "rho_v" in capsys.readouterr().err

    def test_unknown_key_exits_2(self, tmp_path, capsys):
        path = self.write_config(tmp_path, rho_vv=0.5)
        assert main(["run", str(path), "--no-figures"]) == 2

    def test_missing_config_file_exits_2(self, tmp_path):
        assert main(["run", str(tmp_path / "nope.json"), "--no-figures"]) == 2

    def test_list_experiments(self, capsys):
        assert main(["list-experiments"]) == 0
        out = capsys.readouterr().out.split()
        assert set(out) == set(EXPERIMENT_KINDS)

    def test_print_config_template(self, capsys):
        assert main(["print-config-template", "strobo"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["experiment"] == "strobo"
        assert data["n_realizations"] == 1024

    def test_compare_golden_subcommand(self, tmp_path):
        path = self.write_config(tmp_path)
        main(["run", str(path), "--out", str(tmp_path), "--no-figures"])
        result = tmp_path / "base-dynamics.csv"
        golden = tmp_path / "golden.csv"
        golden.write_bytes(result.read_bytes())
        assert main(["compare-golden", str(result), str(golden)]) == 0

    def test_compare_golden_detects_mismatch(self, tmp_path, capsys):
        path = self.write_config(tmp_path)
        main(["run", str(path), "--out", str(tmp_path), "--no-figures"])
        result = tmp_path / "base-dynamics.csv"
        text = result.read_text().splitlines()
        header_idx = next(i for i, line in enumerate(text)
                          if not line.startswith("#"))
        row = text[header_idx + 1].split(",")
        row[3] = repr(float(row[3]) + 1.0)  # site_0 column, strict tolerance
        text[header_idx + 1] = ",".join(row)
        golden = tmp_path / "golden.csv"
        golden.write_text("\n".join(text) + "\n")
        assert main(["compare-golden", str(result), str(golden)]) == 1
        assert "site_0" in capsys.readouterr().out
