import os

import numpy as np
import pytest

from wavetank.cli import main
from wavetank.fields import read_state_file


def run_cli(*argv):
    return main(list(argv))


@pytest.fixture
def outdir(tmp_path, monkeypatch):
    monkeypatch.delenv("CKDV_OUT", raising=False)
    return tmp_path


class TestParsing:
    def test_unknown_subcommand_names_token(self, capsys):
        assert run_cli("frobnicate") == 2
        assert "frobnicate" in capsys.readouterr().err

    def test_unknown_flag_rejected(self, capsys, outdir):
        assert run_cli("run", "--out", str(outdir), "--bogus", "1") == 2
        assert "--bogus" in capsys.readouterr().err

    def test_missing_config_file(self, capsys, outdir):
        assert run_cli("run", "--config", str(outdir / "nope.cfg"),
                       "--out", str(outdir)) == 2

    def test_bad_modes_list(self, capsys, outdir):
        assert run_cli("run", "--modes", "2,q", "--out", str(outdir)) == 2


class TestRun:
    def test_t_end_zero_initial_snapshot_only(self, outdir):
        code = run_cli("run", "--t-end", "0", "--out", str(outdir),
                       "--run-id", "t0")
        assert code == 0
        files = os.listdir(outdir / "t0")
        assert "config.cfg" in files
        states = [f for f in files if f.endswith("_state.dat")]
        assert len(states) == 1
        assert any(f.endswith("_field.dat") for f in files)

    def test_overrides_beat_file_values(self, outdir):
        cfgfile = outdir / "base.cfg"
        cfgfile.write_text("[run]\nt_end = 0.01\n")
        code = run_cli("run", "--config", str(cfgfile), "--t-end", "0",
                       "--out", str(outdir), "--run-id", "ovr")
        assert code == 0
        echoed = (outdir / "ovr" / "config.cfg").read_text()
        assert "t_end = 0" in echoed

    def test_short_run_emits_mode_and_field_files(self, outdir):
        code = run_cli("run", "--t-end", "0.002", "--out", str(outdir),
                       "--run-id", "short", "--snapshot-every", "20")
        assert code == 0
        files = sorted(os.listdir(outdir / "short"))
        for n in (2, 4, 6, 8, 10):
            assert any(f"mode{n}.dat" in f for f in files)
        assert any(f.endswith("_xsec.dat") for f in files)
        assert any(f.endswith("_meta.txt") for f in files)

    def test_byte_identical_reruns(self, outdir):
        for rid in ("rep1", "rep2"):
            assert run_cli("run", "--t-end", "0.002", "--out", str(outdir),
                           "--run-id", rid) == 0
        d1, d2 = outdir / "rep1", outdir / "rep2"
        data1 = sorted(f for f in os.listdir(d1) if f.endswith(".dat"))
        data2 = sorted(f for f in os.listdir(d2) if f.endswith(".dat"))
        assert [f.replace("rep1", "") for f in data1] == \
               [f.replace("rep2", "") for f in data2]
        for f1, f2 in zip(data1, data2):
            assert (d1 / f1).read_bytes() == (d2 / f2).read_bytes()

    def test_env_var_out_root(self, tmp_path, monkeypatch):
        monkeypatch.setenv("CKDV_OUT", str(tmp_path / "envroot"))
        assert run_cli("run", "--t-end", "0", "--run-id", "envrun") == 0
        assert (tmp_path / "envroot" / "envrun" / "config.cfg").exists()

    def test_flag_beats_env_var(self, tmp_path, monkeypatch):
        monkeypatch.setenv("CKDV_OUT", str(tmp_path / "envroot"))
        assert run_cli("run", "--t-end", "0", "--out", str(tmp_path / "flag"),
                       "--run-id", "x") == 0
        assert (tmp_path / "flag" / "x" / "config.cfg").exists()
        assert not (tmp_path / "envroot").exists()

    def test_config_echo_reproduces_run(self, outdir):
        # the echoed resolved config alone re-runs the experiment
        assert run_cli("run", "--t-end", "0.002", "--snapshot-every", "100",
                       "--out", str(outdir), "--run-id", "orig") == 0
        echoed = outdir / "orig" / "config.cfg"
        assert run_cli("run", "--config", str(echoed), "--out", str(outdir),
                       "--run-id", "again") == 0
        d1, d2 = outdir / "orig", outdir / "again"
        data1 = sorted(f for f in os.listdir(d1) if f.endswith(".dat"))
        for f1 in data1:
            f2 = f1.replace("orig", "again")
            assert (d1 / f1).read_bytes() == (d2 / f2).read_bytes()

    def test_invalid_config_exits_2(self, outdir):
        cfgfile = outdir / "bad.cfg"
        cfgfile.write_text("[paddle]\nl = 1e-6\n")  # under-resolved pulse
        assert run_cli("run", "--config", str(cfgfile),
                       "--out", str(outdir)) == 2

    def test_unstable_run_exits_3(self, outdir, capsys):
        # dt far beyond the dispersive limit of a fine grid
        with pytest.warns(RuntimeWarning):
            code = run_cli("run", "--t-end", "0.02", "--dx", "0.001",
                           "--dt", "1e-4", "--out", str(outdir),
                           "--run-id", "boom")
        assert code == 3

    def test_state_files_readable(self, outdir):
        assert run_cli("run", "--t-end", "0.001", "--out", str(outdir),
                       "--run-id", "rd") == 0
        d = outdir / "rd"
        state_files = sorted(f for f in os.listdir(d)
                             if f.endswith("_state.dat"))
        t, x, theta = read_state_file(d / state_files[0])
        assert t == 0.0
        assert theta.shape[0] == 5
        assert np.all(np.isfinite(theta))


class TestCoeffs:
    def test_tables_and_reconciliation_on_disk(self, outdir):
        assert run_cli("coeffs", "--out", str(outdir), "--run-id", "co") == 0
        d = outdir / "co"
        assert (d / "cd_table.dat").exists()
        assert (d / "g_tensor.dat").exists()
        text = (d / "reconciliation.dat").read_text()
        assert "CONFIRMED" in text
        rows = [l for l in (d / "g_tensor.dat").read_text().splitlines()
                if not l.startswith("#")]
        assert len(rows) == 125

    def test_custom_modes_skip_reconciliation(self, outdir):
        assert run_cli("coeffs", "--modes", "1,2,3", "--out", str(outdir),
                       "--run-id", "m3") == 0
        assert not (outdir / "m3" / "reconciliation.dat").exists()


class TestFissionCommand:
    def test_fission_report(self, outdir):
        assert run_cli("fission", "--out", str(outdir), "--run-id", "fi") == 0
        text = (outdir / "fi" / "fission_report.txt").read_text()
        assert "predicted 1, detected 1" in text
        assert "predicted 2, detected 2" in text
