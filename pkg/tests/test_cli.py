import json

import pytest

from qmmsim.cli import (
    execute,
    format_sci9,
    main,
    parse_config,
    write_table,
)
from qmmsim.errors import ConfigError, InternalError

TEMPS_CFG = """# photon transition temperatures
command = temps
regime = weak_disorder
delta0_K = 4
m_eta2_N_K = 20
"""

FAST_LASING_CFG = """command = simulate
scenario = lasing
n_cells = 128
n_qubits = 8
amplitudes = 1e-6
duration = 30
seed = 99
"""


class TestParse:
    def test_temps_example(self):
        cfg = parse_config(TEMPS_CFG)
        assert cfg.command == "temps"
        assert cfg.params["delta0_K"] == 4.0
        assert cfg.params["m_eta2_N_K"] == 20.0
        assert cfg.seed == 0

    def test_unknown_command(self):
        with pytest.raises(ConfigError, match="unknown command"):
            parse_config("command = warp")

    def test_empty_file_lists_required(self):
        with pytest.raises(ConfigError, match="command"):
            parse_config("")

    def test_unknown_key_suggests_nearest(self):
        with pytest.raises(ConfigError, match="nearest valid key: regime"):
            parse_config(TEMPS_CFG + "regmie = x\n")

    def test_type_mismatch_reports_line(self):
        with pytest.raises(ConfigError, match="line 4"):
            parse_config("command = temps\nregime = weak_disorder\n"
                         "delta0_K = 4\nm_eta2_N_K = twenty\n")

    def test_duplicate_key(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config(TEMPS_CFG + "regime = strong_disorder\n")

    def test_malformed_line(self):
        with pytest.raises(ConfigError, match="line 2"):
            parse_config("command = temps\nnonsense here\n")

    def test_missing_required(self):
        with pytest.raises(ConfigError, match="delta0_K"):
            parse_config("command = temps\nregime = weak_disorder\nm_eta2_N_K = 20\n")

    def test_seed_range(self):
        with pytest.raises(ConfigError, match="seed"):
            parse_config(TEMPS_CFG + "seed = -3\n")

    def test_range_check_before_compute(self):
        with pytest.raises(ConfigError):
            parse_config("command = scatter\ndrive_amplitude = 0.9\n")

    def test_scenario_required(self):
        with pytest.raises(ConfigError, match="scenario"):
            parse_config("command = simulate")

    def test_stray_scenario_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config("command = simulate\nscenario = lasing\nchi0 = 0.3\n")

    def test_hash_stable(self):
        a = parse_config(TEMPS_CFG)
        b = parse_config(TEMPS_CFG)
        assert a.content_hash() == b.content_hash()


class TestWriteTable:
    def test_formatting_contract(self, tmp_path):
        path = tmp_path / "t.csv"
        write_table([(1.0, 0.5)], ("omega", "t2"), path)
        assert path.read_bytes() == b"omega,t2\n1.000000000e0,5.000000000e-1\n"

    def test_zero_rows_header_only(self, tmp_path):
        path = tmp_path / "t.csv"
        write_table([], ("a", "b"), path)
        assert path.read_bytes() == b"a,b\n"

    def test_nan_rejected(self, tmp_path):
        with pytest.raises(InternalError):
            write_table([(float("nan"),)], ("x",), tmp_path / "t.csv")

    def test_schema_mismatch_is_internal_error(self, tmp_path):
        with pytest.raises(InternalError):
            write_table([(1.0, 2.0)], ("only",), tmp_path / "t.csv")

    def test_none_renders_empty(self, tmp_path):
        path = tmp_path / "t.csv"
        write_table([(1.0, None)], ("a", "b"), path)
        assert path.read_text() == "a,b\n1.000000000e0,\n"

    def test_sci9_samples(self):
        assert format_sci9(20.0) == "2.000000000e1"
        assert format_sci9(0.0) == "0.000000000e0"
        assert format_sci9(-0.125) == "-1.250000000e-1"
        assert format_sci9(9.9999999996) == "1.000000000e1"


class TestExecute:
    def test_temps_run(self, tmp_path):
        cfg = parse_config(TEMPS_CFG)
        cfg.output_dir = str(tmp_path)
        assert execute(cfg) == 0
        table = (tmp_path / "temps.csv").read_text()
        assert table == "regime,T_star_K,valid\nweak_disorder,2.000000000e1,true\n"
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["checks"]["T_star_K"] == 20.0
        assert manifest["config_hash"] == cfg.content_hash()
        assert manifest["finished_utc"] is not None

    def test_bands_uniform_no_gap_rows(self, tmp_path):
        cfg = parse_config("command = bands\nsegments = 8:0\n"
                           "omega_min = 0.05\nomega_max = 1.0\nn_omega = 40\n")
        cfg.output_dir = str(tmp_path)
        assert execute(cfg) == 0
        lines = (tmp_path / "bands.csv").read_text().splitlines()
        assert all(",false," in ln for ln in lines[1:])
        assert (tmp_path / "gaps.csv").read_text() == "omega_low,omega_high\n"

    def test_manifest_written_before_results(self, tmp_path, monkeypatch):
        from qmmsim import cli
        from qmmsim.errors import DivergenceError

        def boom(cfg, outdir, jobs):
            raise DivergenceError("synthetic blow-up", step_index=7)

        monkeypatch.setitem(cli.RUNNERS, "temps", boom)
        cfg = parse_config(TEMPS_CFG)
        cfg.output_dir = str(tmp_path)
        assert execute(cfg) == 2
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["checks"]["error"].startswith("synthetic")
        assert not (tmp_path / "temps.csv").exists()

    def test_strict_not_detected_exit_code(self, tmp_path):
        cfg = parse_config(FAST_LASING_CFG)
        cfg.output_dir = str(tmp_path)
        assert execute(cfg, strict=False) == 0
        assert execute(cfg, strict=True) == 3
        rows = (tmp_path / "onset.csv").read_text().splitlines()
        assert rows[0] == "amplitude,tau_onset,detected,sqrt_a_tau"
        assert ",false," in rows[1]

    def test_reproducible_csv_bytes(self, tmp_path):
        outputs = []
        for sub in ("a", "b"):
            cfg = parse_config(FAST_LASING_CFG)
            cfg.output_dir = str(tmp_path / sub)
            assert execute(cfg) == 0
            outputs.append((tmp_path / sub / "onset.csv").read_bytes())
        assert outputs[0] == outputs[1]

    def test_jobs_do_not_change_output(self, tmp_path):
        text = FAST_LASING_CFG.replace("amplitudes = 1e-6",
                                       "amplitudes = 1e-6,2e-6,4e-6")
        outs = []
        for sub, jobs in (("j1", 1), ("j2", 3)):
            cfg = parse_config(text)
            cfg.output_dir = str(tmp_path / sub)
            assert execute(cfg, jobs=jobs) == 0
            outs.append((tmp_path / sub / "onset.csv").read_bytes())
        assert outs[0] == outs[1]

    def test_unwritable_output_dir(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        cfg = parse_config(TEMPS_CFG)
        cfg.output_dir = str(blocker / "sub")  # parent is a regular file
        assert execute(cfg) == 1

    def test_permittivity_table(self, tmp_path):
        cfg = parse_config("command = permittivity\npop_factor = 1.0\n"
                           "n_omega = 11\n")
        cfg.output_dir = str(tmp_path)
        assert execute(cfg) == 0
        lines = (tmp_path / "permittivity.csv").read_text().splitlines()
        assert lines[0] == "omega,eps_re,eps_im"
        assert len(lines) == 12

    def test_permittivity_stack_outputs(self, tmp_path):
        cfg = parse_config("command = permittivity\nmode = stack\nn_omega = 21\n"
                           "omega_min = 0.95\nomega_max = 1.05\n")
        cfg.output_dir = str(tmp_path)
        assert execute(cfg) == 0
        assert (tmp_path / "transmission.csv").exists()


class TestMain:
    def test_end_to_end(self, tmp_path):
        cfg_path = tmp_path / "run.cfg"
        cfg_path.write_text(TEMPS_CFG + f"output_dir = {tmp_path / 'out'}\n")
        assert main([str(cfg_path)]) == 0
        assert (tmp_path / "out" / "temps.csv").exists()

    def test_missing_config_file(self, tmp_path):
        assert main([str(tmp_path / "nope.cfg")]) == 1

    def test_bad_config_exit_1(self, tmp_path):
        cfg_path = tmp_path / "run.cfg"
        cfg_path.write_text("command = warp\n")
        assert main([str(cfg_path)]) == 1
