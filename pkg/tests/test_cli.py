import io
import shutil
import subprocess
from pathlib import Path

import pytest

from mimobeam import cli
from mimobeam.errors import ConfigError

REPO = Path(__file__).resolve().parent.parent
DEFAULT_CFG = REPO / "configs" / "default.cfg"


def run_cli(args):
    return cli.main([str(a) for a in args])


class TestSnrParsing:
    def test_range(self):
        assert cli.parse_snr_range("0:30:10") == (0.0, 10.0, 20.0, 30.0)

    def test_list(self):
        assert cli.parse_snr_range("-5, 0, 5") == (-5.0, 0.0, 5.0)

    def test_bad_step(self):
        with pytest.raises(ConfigError):
            cli.parse_snr_range("0:10:0")


class TestConfigLoading:
    def test_default_config_parses(self):
        cfg = cli.load_config(DEFAULT_CFG)
        cfg.validate()
        assert cfg.trials == 100
        assert [m.name for m in cfg.methods] == [
            "smi", "lsmi", "worst_case", "prob_gaussian", "prob_chebyshev"]
        assert cfg.snr_grid_db[0] == -10.0 and cfg.snr_grid_db[-1] == 20.0
        assert cfg.scenario.tx.elements == 10
        assert cfg.scenario.signal_in_training

    def test_missing_file_message(self):
        with pytest.raises(ConfigError, match="no-such-file"):
            cli.load_config("no-such-file.cfg")


class TestCliRuns:
    def test_missing_config_exits_1(self, capsys):
        assert run_cli(["--config", "/tmp/definitely-missing.cfg"]) == 1
        assert "definitely-missing.cfg" in capsys.readouterr().err

    def test_unknown_method_exits_1(self):
        assert run_cli(["--config", DEFAULT_CFG, "--methods", "psychic"]) == 1

    def test_snr_override_rows(self, tmp_path):
        out = tmp_path / "r.csv"
        code = run_cli(["--config", DEFAULT_CFG, "--out", out,
                        "--trials", 1, "--methods", "smi",
                        "--snr", "0:30:10"])
        assert code == 0
        from mimobeam import experiment
        table = experiment.parse_csv(out)
        assert sorted({r.snr_db for r in table.rows}) == [0.0, 10.0, 20.0,
                                                          30.0]

    def test_seed_determinism_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            code = run_cli(["--config", DEFAULT_CFG, "--out", out,
                            "--trials", 2, "--methods", "smi,lsmi",
                            "--snr", "0:10:10", "--seed", 5])
            assert code == 0
        assert a.read_bytes() == b.read_bytes()

    def test_manifest_written(self, tmp_path):
        out = tmp_path / "m.csv"
        assert run_cli(["--config", DEFAULT_CFG, "--out", out, "--trials", 1,
                        "--methods", "smi", "--snr", "0"]) == 0
        manifest = Path(f"{out}.manifest").read_text()
        assert "csv_blob_sha1 = " in manifest
        assert "solver_backend = " in manifest

    def test_entry_point_installed(self):
        exe = shutil.which("mimobeam")
        if exe is None:
            pytest.skip("console script not on PATH")
        proc = subprocess.run([exe, "--config", str(DEFAULT_CFG), "--trials",
                               "1", "--methods", "smi", "--snr", "5",
                               "--out", "/tmp/entrypoint-test.csv"],
                              capture_output=True, text=True)
        assert proc.returncode == 0


class TestBoundDemo:
    def test_prints_certificate(self):
        cfg = cli.load_config(DEFAULT_CFG)
        buf = io.StringIO()
        cli.run_bound_demo(cfg, out=buf)
        text = buf.getvalue()
        assert "certified lower bound" in text
        assert "exact Gaussian probability" in text
        # weak duality visible in the demo output
        lines = dict(ln.split(":", 1) for ln in text.strip().splitlines())
        bound_val = float(lines["certified lower bound      "].strip())
        exact = float(lines["exact Gaussian probability "].strip())
        assert bound_val <= exact + 1e-6
