import json

import numpy as np
import pytest

import lcdirac as lc
from lcdirac.cli import main, parse_config, run_command, trace_csv
from lcdirac.errors import ConfigurationError
from lcdirac.functionals import FunctionalTrace


def base_doc(**over):
    doc = {
        "model": {"m": 1.0, "alpha": 0.0, "beta": 0.25},
        "grid": {"x_min": -6.0, "x_max": 6.0, "n_points": 384, "boundary": "zero_inflow"},
        "command": "simulate",
    }
    doc.update(over)
    return doc


def write_cfg(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


class TestParse:
    def test_minimal_defaults(self):
        cfg = parse_config(json.dumps(base_doc()))
        assert cfg.command == "simulate"
        assert cfg.T == 1.0 and cfg.record_every == 1
        assert cfg.constants.c == 2.0  # 8 * |beta|
        assert cfg.out_format == "csv"

    def test_unknown_key_named(self):
        doc = base_doc()
        doc["modle"] = {"m": 1.0}
        with pytest.raises(ConfigurationError, match="modle"):
            parse_config(json.dumps(doc))

    def test_unknown_nested_key_named(self):
        doc = base_doc()
        doc["model"]["mass"] = 2.0
        with pytest.raises(ConfigurationError, match=r"model\.mass"):
            parse_config(json.dumps(doc))

    def test_constants_inequality_cited(self):
        doc = base_doc(constants={"K": 1.0, "c_star": 16.0})
        with pytest.raises(ConfigurationError, match=r"-K\+2c_\*<-1"):
            parse_config(json.dumps(doc))

    def test_malformed_document_line(self):
        with pytest.raises(ConfigurationError, match="line"):
            parse_config('{"model": {,}}')

    def test_unknown_command(self):
        with pytest.raises(ConfigurationError, match="command"):
            parse_config(json.dumps(base_doc(command="simulat")))

    def test_unknown_audit(self):
        with pytest.raises(ConfigurationError, match="audit"):
            parse_config(json.dumps(base_doc(audit_selection=["charge", "bogus"])))

    def test_complex_amplitude_forms(self):
        doc = base_doc(
            init={
                "u0": {"kind": "gaussian_pulse", "amplitude": [0.3, 0.4], "width": 1.0},
                "v0": {"kind": "uniform", "amplitude": 0.1},
            }
        )
        cfg = parse_config(json.dumps(doc))
        assert cfg.init.u0.amplitude == 0.3 + 0.4j
        assert cfg.init.v0.amplitude == 0.1 + 0j


class TestSimulate:
    def test_zero_datum_exit_zero(self, tmp_path):
        doc = base_doc(
            time={"T": 1.0},
            output={"path": str(tmp_path / "run"), "format": "csv"},
        )
        assert run_command(parse_config(json.dumps(doc))) == 0
        trace = (tmp_path / "run_trace.csv").read_text().splitlines()
        assert trace[0].startswith("t,L0,D0,Q0,cumD0,charge,max_abs_u,max_abs_v")
        row = trace[1].split(",")
        assert all(float(x) == 0.0 for x in row[1:])
        assert (tmp_path / "run_snapshots.csv").exists()

    def test_trace_roundtrip_17_digits(self, tmp_path, rng):
        doc = base_doc(
            time={"T": 0.5},
            init={
                "u0": {"kind": "gaussian_pulse", "amplitude": 0.731234567890123, "width": 1.1},
                "v0": {"kind": "gaussian_pulse", "amplitude": 0.392837465, "width": 0.9},
            },
            output={"path": str(tmp_path / "run"), "format": "csv"},
        )
        cfg = parse_config(json.dumps(doc))
        assert run_command(cfg) == 0
        # recompute the same trace in memory and compare parsed bytes
        f0 = lc.sample_initial(cfg.init, cfg.grid)
        snaps = lc.evolve(f0, cfg.model, lc.SolverConfig(), 0.5)
        from lcdirac.functionals import trace_base

        tr = trace_base(snaps, None)
        lines = (tmp_path / "run_trace.csv").read_text().splitlines()[1:]
        parsed = np.array([[float(x) for x in ln.split(",")] for ln in lines])
        assert np.array_equal(parsed[:, 1], tr.L0)
        assert np.array_equal(parsed[:, 3], tr.Q0)

    def test_empty_trace_header_only(self):
        empty = FunctionalTrace(*(np.array([]) for _ in range(8)))
        text = trace_csv(empty)
        assert text == "t,L0,D0,Q0,cumD0,charge,max_abs_u,max_abs_v\n"

    def test_pair_trace_columns_serialized(self, tmp_path, rng):
        from lcdirac.cli import emit_outputs
        from lcdirac.functionals import trace_pair

        g = lc.make_grid(-6.0, 6.0, 384, "zero_inflow")
        dom = lc.TriangleDomain(-4.0, 4.0, 0.0)
        k = lc.derive_constants(lc.GROSS_NEVEU)
        datum = lc.random_smooth_datum(rng, g, 0.005, (-3, 3))
        f0 = lc.sample_initial(datum, g)
        fB0 = lc.SpinorField(g, 0.0, f0.u * 1.001, f0.v * 1.001)
        a = lc.evolve(f0, lc.GROSS_NEVEU, lc.SolverConfig(), 1.0)
        b = lc.evolve(fB0, lc.GROSS_NEVEU, lc.SolverConfig(), 1.0)
        out = emit_outputs(trace_pair(a, b, dom, k), "csv", tmp_path / "pair_trace")
        header = out.read_text().splitlines()[0]
        assert header == "t,L0,D0,Q0,cumD0,charge,max_abs_u,max_abs_v,L1,D1,Q1,cumD1"

    def test_singular_datum_simulates(self, tmp_path):
        doc = base_doc(
            time={"T": 0.5},
            init={
                "u0": {"kind": "power_singularity_truncated", "amplitude": 0.1,
                       "exponent": 0.3, "cap": 40.0, "halfwidth": 1.0},
                "v0": {"kind": "uniform", "amplitude": 0.0},
            },
            output={"path": str(tmp_path / "rough")},
        )
        assert run_command(parse_config(json.dumps(doc))) == 0


class TestAudit:
    def audit_doc(self, tmp_path, **over):
        doc = base_doc(
            command="audit",
            time={"T": 2.0},
            init={
                "u0": {"kind": "gaussian_pulse", "amplitude": 0.07, "center": -0.5, "width": 0.8},
                "v0": {"kind": "gaussian_pulse", "amplitude": 0.055, "center": 0.5, "width": 0.9},
            },
            domain={"a": -4.0, "b": 4.0},
            audit={"samples": 20000},
            output={"path": str(tmp_path / "aud"), "format": "csv"},
        )
        doc.update(over)
        return doc

    def test_full_suite_exit_zero(self, tmp_path):
        doc = self.audit_doc(tmp_path)
        assert run_command(parse_config(json.dumps(doc))) == 0
        text = (tmp_path / "aud_audits.csv").read_text()
        assert text.count("true") >= 6

    def test_bony_smallness_exit_two(self, tmp_path, capsys):
        doc = self.audit_doc(tmp_path, audit_selection=["bony"])
        doc["init"]["u0"]["amplitude"] = 2.0
        doc["init"]["v0"]["amplitude"] = 1.5
        assert run_command(parse_config(json.dumps(doc))) == 2
        assert "smallness" in capsys.readouterr().err

    def test_structured_report_format(self, tmp_path):
        doc = self.audit_doc(
            tmp_path,
            audit_selection=["algebraic", "charge"],
            output={"path": str(tmp_path / "aud"), "format": "structured-report"},
        )
        assert run_command(parse_config(json.dumps(doc))) == 0
        records = json.loads((tmp_path / "aud_audits.json").read_text())
        assert [r["audit"] for r in records] == ["algebraic", "charge"]
        assert all(r["passed"] for r in records)
        assert all("tolerance_budget" in r for r in records)


class TestConvergeUnique:
    def test_converge_command(self, tmp_path):
        doc = base_doc(
            command="converge",
            time={"T": 0.25},
            grid={"x_min": -6.0, "x_max": 6.0, "n_points": 384, "boundary": "zero_inflow"},
            init={
                "u0": {"kind": "indicator_jump", "amplitude": 1.0, "halfwidth": 1.0},
                "v0": {"kind": "indicator_jump", "amplitude": 0.75, "center": -0.5, "halfwidth": 1.0},
            },
            mollify={"epsilons": [0.25, 0.125]},
            output={"path": str(tmp_path / "conv"), "format": "csv"},
        )
        assert run_command(parse_config(json.dumps(doc))) == 0
        lines = (tmp_path / "conv_convergence.csv").read_text().splitlines()
        assert lines[0] == "eps_coarse,eps_fine,field_distance,product_distance"
        assert len(lines) == 2

    def test_unique_command(self, tmp_path):
        doc = base_doc(
            command="unique",
            time={"T": 0.25},
            init={
                "u0": {"kind": "indicator_jump", "amplitude": 1.0, "halfwidth": 1.0},
                "v0": {"kind": "uniform", "amplitude": 0.0},
            },
            mollify={"epsilons": [0.25, 0.125], "kernel": "bump", "kernel_b": "triangle"},
            output={"path": str(tmp_path / "uni"), "format": "csv"},
        )
        assert run_command(parse_config(json.dumps(doc))) == 0
        lines = (tmp_path / "uni_uniqueness.csv").read_text().splitlines()
        assert len(lines) == 3

    def test_converge_requires_epsilons(self, tmp_path):
        doc = base_doc(command="converge", output={"path": str(tmp_path / "x")})
        assert run_command(parse_config(json.dumps(doc))) == 2


class TestSolitonCheck:
    def test_accepted(self, tmp_path):
        doc = base_doc(
            command="soliton-check",
            model={"m": 1.0, "alpha": 1.0, "beta": 0.0},
            grid={"x_min": -16.0, "x_max": 16.0, "n_points": 512, "boundary": "zero_inflow"},
            soliton={"frequency": 0.5},
            output={"path": str(tmp_path / "sol"), "format": "csv"},
        )
        assert run_command(parse_config(json.dumps(doc))) == 0
        text = (tmp_path / "sol_soliton.csv").read_text()
        assert "true" in text

    def test_bad_frequency_exit_two(self, tmp_path):
        doc = base_doc(
            command="soliton-check",
            model={"m": 1.0, "alpha": 1.0, "beta": 0.0},
            soliton={"frequency": 2.0},
            output={"path": str(tmp_path / "sol")},
        )
        assert run_command(parse_config(json.dumps(doc))) == 2


class TestMain:
    def test_missing_file(self, capsys):
        assert main(["/nonexistent/cfg.json"]) == 2
        assert "cannot read config" in capsys.readouterr().err

    def test_end_to_end(self, tmp_path):
        doc = base_doc(time={"T": 0.5}, output={"path": str(tmp_path / "e2e")})
        assert main([str(write_cfg(tmp_path, doc))]) == 0

    def test_byte_identical_reruns(self, tmp_path):
        doc = base_doc(
            command="audit",
            time={"T": 1.0},
            init={
                "u0": {"kind": "gaussian_pulse", "amplitude": 0.07, "width": 0.8},
                "v0": {"kind": "gaussian_pulse", "amplitude": 0.055, "width": 0.9},
            },
            domain={"a": -4.0, "b": 4.0},
            audit={"samples": 5000},
        )
        outs = []
        for tag in ("one", "two"):
            doc["output"] = {"path": str(tmp_path / tag / "run"), "format": "csv"}
            assert run_command(parse_config(json.dumps(doc))) == 0
            outs.append((tmp_path / tag / "run_audits.csv").read_bytes())
        assert outs[0] == outs[1]
