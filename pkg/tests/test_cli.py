import json

import numpy as np
import pytest
from click.testing import CliRunner

from cvnet.cli import main
from cvnet.dynamics import TWO_PI, CouplingParams
from cvnet.network import DistillConfig, DistillMethod, fidelity_curve


@pytest.fixture
def runner():
    return CliRunner()


def parse_kv(output: str) -> dict:
    values = {}
    for line in output.splitlines():
        if " = " in line:
            key, _, val = line.partition(" = ")
            try:
                values[key.strip()] = float(val)
            except ValueError:
                pass
    return values


class TestEvolveCommand:
    def test_initial_time(self, runner):
        res = runner.invoke(main, ["evolve", "--tprime", "0", "--nbar", "0", "--r", "1.5"])
        assert res.exit_code == 0
        vals = parse_kv(res.output)
        assert vals["q0"] == vals["q1"] == vals["q2"] == 0.5
        assert vals["t0"] == vals["t1"] == vals["t2"] == 0.0

    def test_near_period_returns_to_initial(self, runner):
        res = runner.invoke(
            main,
            ["evolve", "--tprime", "6.283185307", "--nbar", "1000", "--r", "1.00000025"],
        )
        assert res.exit_code == 0
        vals = parse_kv(res.output)
        assert vals["q0"] == pytest.approx(1000.5, abs=1e-3)
        assert vals["q1"] == pytest.approx(0.5, abs=1e-3)
        assert vals["q2"] == pytest.approx(0.5, abs=1e-3)
        for name in ("t0", "t1", "t2"):
            assert vals[name] == pytest.approx(0.0, abs=1e-3)

    def test_half_period_decoupling(self, runner):
        res = runner.invoke(
            main,
            ["evolve", "--tprime", "3.141592653589793", "--nbar", "0", "--r", "1.00000025"],
        )
        assert res.exit_code == 0
        vals = parse_kv(res.output)
        assert vals["t1"] == pytest.approx(0.0, abs=1e-3)
        assert vals["t2"] == pytest.approx(0.0, abs=1e-3)
        assert vals["q1"] == pytest.approx(vals["q2"], rel=1e-9)

    def test_bad_flags_exit_2(self, runner):
        assert runner.invoke(main, ["evolve"]).exit_code == 2
        assert runner.invoke(main, ["evolve", "--tprime", "1", "--r", "0.5"]).exit_code == 2


class TestCurveCommand:
    def test_csv_contract_and_reproducibility(self, runner, tmp_path):
        out = tmp_path / "curve.csv"
        args = [
            "curve", "--k", "0", "--method", "trace", "--nbar", "0",
            "--r", "1.00000025", "--grid", "5.0:7.5:41", "--out", str(out),
        ]
        assert runner.invoke(main, args).exit_code == 0
        text = out.read_bytes()
        lines = text.decode("ascii").split("\n")
        assert lines[0] == "t_prime,f_plus,f_minus"
        assert lines[-1] == ""
        assert len(lines) == 43  # header + 41 rows + trailing newline
        assert b"\r" not in text

        grid = np.linspace(5.0, 7.5, 41)
        curve = fidelity_curve(
            DistillConfig(
                k=0, method=DistillMethod.TRACE, params=CouplingParams(r=1.00000025)
            ),
            grid,
        )
        row5 = lines[6].split(",")
        assert float(row5[0]) == grid[5]
        assert float(row5[1]) == curve.f_plus[5]
        assert float(row5[2]) == curve.f_minus[5]

        manifest_path = out.with_suffix(".manifest.json")
        manifest = json.loads(manifest_path.read_text())
        assert manifest["command"] == "curve"
        assert manifest["parameters"]["grid_n"] == 41
        assert manifest["version"]

        out2 = tmp_path / "curve2.csv"
        args2 = args[:-1] + [str(out2)]
        assert runner.invoke(main, args2).exit_code == 0
        assert out2.read_bytes() == text

    def test_threads_env_does_not_change_bytes(self, runner, tmp_path):
        base, threaded = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["curve", "--k", "2", "--method", "het", "--nbar", "1",
                "--r", "1.00000025", "--out"]
        assert runner.invoke(main, args + [str(base)]).exit_code == 0
        assert runner.invoke(main, args + [str(threaded)],
                             env={"CVNET_THREADS": "4"}).exit_code == 0
        assert base.read_bytes() == threaded.read_bytes()

    def test_bad_grid_exits_2(self, runner, tmp_path):
        out = tmp_path / "x.csv"
        res = runner.invoke(main, ["curve", "--grid", "3:1:5", "--out", str(out)])
        assert res.exit_code == 2
        res = runner.invoke(main, ["curve", "--grid", "junk", "--out", str(out)])
        assert res.exit_code == 2

    def test_unwritable_path_exits_1(self, runner):
        res = runner.invoke(
            main, ["curve", "--out", "/proc/definitely/not/writable/x.csv"]
        )
        assert res.exit_code == 1

    @pytest.mark.parametrize(
        "preset,expected",
        [
            ("fig3", ["fig3_k0_trace_nbar0.csv", "fig3_k0_trace_nbar1000.csv",
                      "fig3_k2_trace_nbar0.csv", "fig3_k2_trace_nbar1000.csv",
                      "fig3_markers.json"]),
            ("fig4", ["fig4_k2_het_nbar0.csv", "fig4_k2_het_nbar1.csv",
                      "fig4_k2_het_nbar1e07.csv"]),
            ("fig5", ["fig5_k0_trace_nbar0.csv", "fig5_k0_trace_nbar100000.csv",
                      "fig5_k0_het_nbar0.csv", "fig5_k0_het_nbar100000.csv"]),
        ],
    )
    def test_presets_emit_expected_files(self, runner, tmp_path, preset, expected):
        out = tmp_path / preset
        res = runner.invoke(main, ["curve", "--preset", preset, "--out", str(out)])
        assert res.exit_code == 0, res.output
        for name in expected:
            assert (out / name).exists(), name
            if name.endswith(".csv"):
                header = (out / name).read_text().splitlines()[0]
                assert header == "t_prime,f_plus,f_minus"
                assert (out / name).with_suffix(".manifest.json").exists()

    def test_fig3_markers_hold_interval(self, runner, tmp_path):
        out = tmp_path / "fig3"
        assert runner.invoke(main, ["curve", "--preset", "fig3", "--out", str(out)]).exit_code == 0
        markers = json.loads((out / "fig3_markers.json").read_text())
        interval = markers["telecloning_interval"]
        assert interval["t_lo"] == pytest.approx(TWO_PI, abs=1e-6)
        assert interval["t_hi"] > interval["t_lo"]

    def test_fig3_curves_hit_recurrence_anchor(self, runner, tmp_path):
        # the curve at the exact grid centre t' = 2 pi must give F = 1/2 (k=0)
        out = tmp_path / "fig3"
        assert runner.invoke(main, ["curve", "--preset", "fig3", "--out", str(out)]).exit_code == 0
        rows = (out / "fig3_k0_trace_nbar0.csv").read_text().splitlines()[1:]
        mid = rows[len(rows) // 2].split(",")
        assert float(mid[0]) == pytest.approx(TWO_PI, abs=1e-12)
        assert float(mid[1]) == pytest.approx(0.5, abs=1e-9)
        assert float(mid[2]) == pytest.approx(0.5, abs=1e-9)


class TestMilestonesCommand:
    def test_working_point(self, runner):
        res = runner.invoke(main, ["milestones", "--r", "1.00000025", "--nbar", "0"])
        assert res.exit_code == 0
        vals = parse_kv(res.output)
        assert vals["f2_max"] == pytest.approx(0.8, abs=5e-3)
        assert vals["f0_at_pi"] == pytest.approx(1.0, abs=1e-6)
        assert vals["boundary_value"] == 0.5


class TestTelecloneCommand:
    def test_interval_narrows_with_temperature(self, runner):
        widths = []
        for nbar in ("0", "1000"):
            res = runner.invoke(main, ["teleclone", "--r", "1.00000025", "--nbar", nbar])
            assert res.exit_code == 0
            vals = parse_kv(res.output)
            assert vals["f_bob0"] > 0.5
            assert vals["f_charlie2"] > 0.5
            widths.append(vals["width"])
        assert widths[1] < widths[0]


class TestMcVerifyCommand:
    def test_vacuum_preset_self_test(self, runner):
        res = runner.invoke(
            main, ["mc-verify", "--preset", "vacuum", "--samples", "100000", "--seed", "7"]
        )
        assert res.exit_code == 0, res.output
        assert "analytic = 0.500000000" in res.output
        assert "self-test OK" in res.output
        z = float(next(l for l in res.output.splitlines() if l.startswith("z =")).split("=")[1])
        assert abs(z) < 3.0

    @pytest.mark.parametrize("preset", ["trace-pi", "het-max", "drift-opt", "drift-zero"])
    def test_other_presets_pass(self, runner, preset):
        res = runner.invoke(
            main, ["mc-verify", "--preset", preset, "--samples", "30000", "--seed", "7"]
        )
        assert res.exit_code == 0, res.output
        assert "self-test OK" in res.output

    def test_self_test_failure_exits_3(self, runner, monkeypatch):
        import cvnet.cli as cli_mod
        from cvnet.mc import McResult

        def rigged(channel, sign, delta, cfg):
            return McResult(
                mean=np.zeros(2), mean_se=np.zeros(2), cm=np.eye(2), cm_se=np.eye(2),
                fidelity=0.9, std_error=1e-6, n_samples=cfg.n_samples,
            )

        monkeypatch.setattr(cli_mod, "run_protocol", rigged)
        res = runner.invoke(
            main, ["mc-verify", "--preset", "vacuum", "--samples", "1000", "--seed", "1"]
        )
        assert res.exit_code == 3
