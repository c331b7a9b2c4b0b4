import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from gaussesd import ConfigError
from gaussesd.cli import main
from gaussesd.config import (
    OutputSpec,
    RunConfig,
    SweepSpec,
    dump_config,
    parse_config,
)

RECIPES = Path(__file__).resolve().parent.parent / "recipes"

EXPECTED_RECIPES = [
    "fig1-gray.cfg",
    "fig1-blue.cfg",
    "fig1-green.cfg",
    "fig1-red.cfg",
    "fig1-black.cfg",
    "fig1-pink.cfg",
    "fig2-blue.cfg",
    "fig2-red.cfg",
    "fig3.cfg",
    "fig4.cfg",
]


def read_csv(path):
    lines = Path(path).read_text().splitlines()
    header = lines[0].split(",")
    rows = [[float(x) for x in line.split(",")] for line in lines[1:]]
    return header, rows


class TestConfig:
    def test_defaults(self):
        cfg = parse_config("")
        assert cfg.state.r == 0.0
        assert cfg.channel.gamma1 == 0.1
        assert cfg.time.t_max == 30.0
        assert cfg.sweep is None
        assert cfg.output.format == "csv"
        assert cfg.oracle.cutoff == 20

    def test_dump_reparses_to_equivalent_run(self):
        cfg = RunConfig(
            sweep=SweepSpec(variable="z0", lo=0.0, hi=2.0, steps=11),
            output=OutputSpec(path="out.csv", format="json"),
        )
        assert parse_config(dump_config(cfg)) == cfg

    def test_dump_is_fully_explicit(self):
        text = dump_config(RunConfig())
        for key in ("z1", "z2", "r", "nu1", "nu2", "gamma1", "gamma2", "nb1", "nb2",
                    "t_max", "n_points", "path", "format", "cutoff", "dt"):
            assert f"{key} = " in text

    def test_unknown_section_rejected(self):
        with pytest.raises(ConfigError, match="unknown section"):
            parse_config("[nonsense]\nx = 1\n")

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config("[state]\nsqueeze = 1\n")

    def test_bad_value_names_field(self):
        with pytest.raises(ConfigError, match=r"\[state\] z1"):
            parse_config("[state]\nz1 = banana\n")

    def test_invalid_physics_rejected(self):
        with pytest.raises(ConfigError):
            parse_config("[channel]\ngamma1 = -1\n")
        with pytest.raises(ConfigError):
            parse_config("[sweep]\nvariable = q\nlo = 0\nhi = 1\nsteps = 5\n")
        with pytest.raises(ConfigError):
            parse_config("[sweep]\nvariable = z0\nlo = 1\nhi = 1\nsteps = 5\n")

    def test_sweep_requires_all_keys(self):
        with pytest.raises(ConfigError, match="missing required key"):
            parse_config("[sweep]\nvariable = z0\nlo = 0\nhi = 1\n")

    def test_recipes_exist_and_parse(self):
        for name in EXPECTED_RECIPES:
            path = RECIPES / name
            assert path.exists(), f"missing recipe {name}"
            cfg = parse_config(path.read_text(), source=name)
            assert cfg.state.r == 1.0


class TestEvolveCommand:
    def test_writes_expected_columns(self, tmp_path):
        out = tmp_path / "run.csv"
        rc = main(["evolve", "--config", str(RECIPES / "fig1-blue.cfg"), "--out", str(out)])
        assert rc == 0
        header, rows = read_csv(out)
        assert header == ["t", "n1", "n2", "m1", "m2", "ms", "mc", "S"]
        assert len(rows) == 301
        assert rows[0][0] == 0.0 and rows[-1][0] == 30.0
        # finite-time sign change for the heated equal channels
        signs = [row[7] for row in rows]
        assert signs[0] < 0 < signs[-1]

    def test_vacuum_input_all_zero(self, tmp_path):
        cfg = tmp_path / "vac.cfg"
        cfg.write_text("[time]\nt_max = 5\nn_points = 6\n")
        out = tmp_path / "vac.csv"
        assert main(["evolve", "--config", str(cfg), "--out", str(out)]) == 0
        _, rows = read_csv(out)
        for row in rows:
            assert all(v == 0.0 for v in row[1:])

    def test_byte_identical_reruns(self, tmp_path):
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (out1, out2):
            main(["evolve", "--config", str(RECIPES / "fig1-gray.cfg"), "--out", str(out)])
        assert out1.read_bytes() == out2.read_bytes()

    def test_twelve_significant_digits(self, tmp_path):
        out = tmp_path / "digits.csv"
        main(["evolve", "--config", str(RECIPES / "fig2-blue.cfg"), "--out", str(out)])
        text = out.read_text()
        assert "1.38109784554" in text  # sinh(1)^2 rendered to 12 digits

    def test_json_format(self, tmp_path):
        out = tmp_path / "run.json"
        rc = main(["evolve", "--config", str(RECIPES / "fig1-blue.cfg"),
                   "--out", str(out), "--format", "json"])
        assert rc == 0
        doc = json.loads(out.read_text())
        assert doc["columns"] == ["t", "n1", "n2", "m1", "m2", "ms", "mc", "S"]
        assert len(doc["rows"]) == 301

    def test_config_error_exit_code(self, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("[state]\nz1 = spam\n")
        assert main(["evolve", "--config", str(bad)]) == 2
        assert main(["evolve", "--config", str(tmp_path / "missing.cfg")]) == 2

    def test_domain_error_exit_code(self, tmp_path):
        bad = tmp_path / "neg.cfg"
        bad.write_text("[state]\nnu1 = -1\n")
        assert main(["evolve", "--config", str(bad)]) == 2  # caught at parse time

    def test_t_max_override(self, tmp_path):
        out = tmp_path / "override.csv"
        main(["evolve", "--config", str(RECIPES / "fig1-blue.cfg"),
              "--out", str(out), "--t-max", "10"])
        _, rows = read_csv(out)
        assert rows[-1][0] == 10.0


class TestEsdCommand:
    def test_finite_time_reports_both_methods(self, tmp_path, capsys):
        cfg = tmp_path / "esd.cfg"
        cfg.write_text(
            "[state]\nz1 = 2\nz2 = 2\nr = 1\n"
            "[channel]\ngamma1 = 0.1\ngamma2 = 0.1\n"
            "[time]\nt_max = 60\n"
        )
        assert main(["esd", "--config", str(cfg)]) == 0
        out = capsys.readouterr().out
        assert "kind: FiniteTime" in out
        assert "t_esd_numeric:" in out
        assert "t_esd_analytic:" in out
        assert "relative_difference:" in out
        rel = float(out.split("relative_difference: ")[1].split()[0])
        assert rel < 1e-6

    def test_asymptotic(self, tmp_path, capsys):
        cfg = tmp_path / "esd.cfg"
        cfg.write_text("[state]\nr = 1\n[channel]\ngamma1 = 0.1\ngamma2 = 0.1\n")
        assert main(["esd", "--config", str(cfg)]) == 0
        out = capsys.readouterr().out
        assert "kind: Asymptotic" in out
        assert "kind_analytic: Asymptotic" in out

    def test_initially_separable_reports_threshold(self, tmp_path, capsys):
        cfg = tmp_path / "esd.cfg"
        cfg.write_text("[state]\nr = 0.3\nnu1 = 1\nnu2 = 1\n")
        assert main(["esd", "--config", str(cfg)]) == 0
        out = capsys.readouterr().out
        assert "kind: InitiallySeparable" in out
        threshold = float(out.split("initial_entanglement_threshold: ")[1].split()[0])
        assert threshold == pytest.approx(math.log(9.0) / 4.0, abs=1e-9)


class TestSweepCommand:
    def test_fig3_boundary(self, tmp_path):
        out = tmp_path / "fig3.csv"
        rc = main(["sweep", "--config", str(RECIPES / "fig3.cfg"),
                   "--out", str(out), "--workers", "2"])
        assert rc == 0
        header, rows = read_csv(out)
        assert header == ["z0", "t", "S", "sign"]
        assert len(rows) == 51 * 121
        separating = sorted({row[0] for row in rows if row[3] > 0})
        z_star = 0.5 * math.acosh(math.exp(2.0))
        assert separating[0] == pytest.approx(z_star, abs=0.05)  # z grid step

    def test_fig4_region_matches_threshold(self, tmp_path):
        out = tmp_path / "fig4.csv"
        assert main(["sweep", "--config", str(RECIPES / "fig4.cfg"), "--out", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["nu1", "nu2", "S0", "sign"]
        assert len(rows) == 41 * 41
        from gaussesd import initial_entanglement_threshold

        for nu1, nu2, s0, sign in rows:
            r_min = initial_entanglement_threshold(nu1, nu2)
            if abs(r_min - 1.0) > 1e-3:  # away from the boundary curve
                assert (s0 > 0) == (r_min > 1.0), (nu1, nu2, s0, r_min)

    def test_degenerate_two_step_sweep(self, tmp_path):
        cfg = tmp_path / "s.cfg"
        cfg.write_text(
            "[state]\nr = 1\n[sweep]\nvariable = t\nlo = 0\nhi = 5\nsteps = 2\n"
        )
        out = tmp_path / "s.csv"
        assert main(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
        _, rows = read_csv(out)
        assert len(rows) == 2

    def test_workers_do_not_change_bytes(self, tmp_path):
        outs = []
        for workers, name in ((1, "w1.csv"), (2, "w2.csv")):
            out = tmp_path / name
            cfg = tmp_path / "zsweep.cfg"
            cfg.write_text(
                "[state]\nr = 1\n[channel]\ngamma1 = 0.1\ngamma2 = 0.1\n"
                "[time]\nt_max = 10\nn_points = 21\n"
                "[sweep]\nvariable = z0\nlo = 0\nhi = 2\nsteps = 9\n"
            )
            assert main(["sweep", "--config", str(cfg), "--out", str(out),
                         "--workers", str(workers)]) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_sweep_without_section_is_config_error(self, tmp_path):
        cfg = tmp_path / "nosweep.cfg"
        cfg.write_text("[state]\nr = 1\n")
        assert main(["sweep", "--config", str(cfg)]) == 2

    def test_physics_domain_error_exit_code(self, tmp_path):
        # squeezing sweep into overflow territory is a domain error (3),
        # not a config error: the config itself is well-formed
        cfg = tmp_path / "overflow.cfg"
        cfg.write_text(
            "[state]\nr = 1\n[time]\nt_max = 1\nn_points = 2\n"
            "[sweep]\nvariable = r0\nlo = 0\nhi = 500\nsteps = 2\n"
        )
        assert main(["sweep", "--config", str(cfg), "--workers", "1",
                     "--out", str(tmp_path / "x.csv")]) == 3


class TestOracleCheckCommand:
    def test_small_custom_config_passes(self, tmp_path, capsys):
        cfg = tmp_path / "oracle.cfg"
        cfg.write_text(
            "[state]\nr = 0.4\n"
            "[channel]\ngamma1 = 0.25\ngamma2 = 0.25\nnb1 = 0.25\nnb2 = 0.25\n"
            "[oracle]\ncutoff = 20\ntimes = 2\n"
        )
        rc = main(["oracle-check", "--config", str(cfg)])
        out = capsys.readouterr().out
        assert rc == 0
        assert "status: pass" in out
        worst = float(out.split("max_deviation: ")[1].split()[0])
        assert worst < 1e-3

    def test_below_certified_cutoff_is_advisory(self, tmp_path, capsys):
        cfg = tmp_path / "oracle.cfg"
        cfg.write_text("[state]\nr = 0.3\n[oracle]\ncutoff = 14\ntimes = 2\n")
        rc = main(["oracle-check", "--config", str(cfg)])
        assert rc == 0
        assert "status: advisory" in capsys.readouterr().out

    def test_insufficient_cutoff_exit_code(self, tmp_path):
        cfg = tmp_path / "oracle.cfg"
        cfg.write_text("[state]\nr = 0.6\n[oracle]\ncutoff = 4\n")
        assert main(["oracle-check", "--config", str(cfg)]) == 4

    def test_outside_certified_domain_is_advisory(self, tmp_path, capsys):
        cfg = tmp_path / "oracle.cfg"
        cfg.write_text(
            "[state]\nr = 0.8\n"
            "[channel]\ngamma1 = 0.25\ngamma2 = 0.25\n"
            "[oracle]\ncutoff = 20\ntimes = 2\n"
        )
        rc = main(["oracle-check", "--config", str(cfg)])
        captured = capsys.readouterr()
        assert rc == 0
        assert "outside certified domain" in captured.err
        assert "status: advisory" in captured.out


class TestDumpConfigCommand:
    def test_round_trip(self, tmp_path, capsys):
        assert main(["dump-config", "--config", str(RECIPES / "fig3.cfg")]) == 0
        text = capsys.readouterr().out
        cfg = parse_config(text)
        assert cfg.sweep is not None and cfg.sweep.variable == "z0"
        assert cfg.state.r == 1.0

    def test_seed_flag_accepted(self, capsys):
        assert main(["dump-config", "--seed", "7"]) == 0
        assert "[state]" in capsys.readouterr().out


class TestEntryPoint:
    def test_module_invocation(self):
        proc = subprocess.run(
            [sys.executable, "-m", "gaussesd", "dump-config"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert "[channel]" in proc.stdout
