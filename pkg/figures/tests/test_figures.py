import csv
import json
from pathlib import Path

import numpy as np
import pytest

from cellfree_figures import (TraceParseError, TracePlotSpec,
                              plot_convergence, plot_network, read_trace)
from cellfree_figures.cli import main

FULLSCALE = Path(__file__).resolve().parents[2] / "artifacts" / "fullscale"

HEADER = ["iter", "step", "min_weighted_sinr", "min_rate_bps_hz", "residual",
          "p_1_dbm", "p_2_dbm"]


def write_trace(path, n_rounds=4, offset=0.0):
    rows = [HEADER, ["0", "init", "nan", "nan", "0", "20.0", "20.0"]]
    for i in range(1, n_rounds + 1):
        rate = 1.0 + offset - 0.5 ** i
        rows.append([str(2 * i - 1), "beamforming", "1.0", f"{rate:.4f}",
                     "0", "20.0", "18.0"])
        rows.append([str(2 * i), "power", "1.1", f"{rate + 0.05:.4f}",
                     "1e-3", "20.0", "17.5"])
    with open(path, "w", newline="") as f:
        csv.writer(f).writerows(rows)
    return path


def write_scenario(path, L=2, K=3, Q=2):
    rng = np.random.default_rng(0)
    d = {
        "ap_positions": rng.uniform(0, 1000, (L, 2)).tolist(),
        "ue_positions": rng.uniform(0, 1000, (K, 2)).tolist(),
        "clusters": [list(range(Q)) for _ in range(K)],
        "gains_db": np.full((L, K), -50.0).tolist(),
        "power_budget_dbm": 20.0,
        "weights": [1.0] * K,
    }
    path.write_text(json.dumps(d))
    return path


class TestReadTrace:
    def test_parses_synthetic(self, tmp_path):
        data = read_trace(write_trace(tmp_path / "t.csv"))
        assert data["steps"][0] == "init"
        assert len(data["min_rate"]) == 9
        assert data["powers_dbm"].shape == (9, 2)

    def test_empty_file_rejected(self, tmp_path):
        p = tmp_path / "empty.csv"
        p.write_text("")
        with pytest.raises(TraceParseError, match="empty"):
            read_trace(p)

    def test_header_only_rejected(self, tmp_path):
        p = tmp_path / "h.csv"
        p.write_text(",".join(HEADER) + "\n")
        with pytest.raises(TraceParseError, match="no data rows"):
            read_trace(p)

    def test_wrong_header_names_column(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("iter,phase,a,b,c\n1,power,1,1,1\n")
        with pytest.raises(TraceParseError, match="header mismatch"):
            read_trace(p)

    def test_bad_row_names_row_number(self, tmp_path):
        p = write_trace(tmp_path / "t.csv")
        lines = p.read_text().splitlines()
        lines[3] = lines[3].replace("power", "warmup")
        p.write_text("\n".join(lines))
        with pytest.raises(TraceParseError, match="row 4"):
            read_trace(p)

    def test_short_row_diagnosed(self, tmp_path):
        p = write_trace(tmp_path / "t.csv")
        lines = p.read_text().splitlines()
        lines[2] = "1,power,1.0"
        p.write_text("\n".join(lines))
        with pytest.raises(TraceParseError, match="row 3 has 3 fields"):
            read_trace(p)


class TestPlotConvergence:
    def test_single_trace(self, tmp_path):
        spec = TracePlotSpec(traces=[(write_trace(tmp_path / "t.csv"), "run")],
                             out_path=tmp_path / "fig.png")
        out = plot_convergence(spec)
        assert out.exists() and out.stat().st_size > 0
        assert spec.records == [("run", 8)]   # init row skipped

    def test_duplicate_labels_rejected(self, tmp_path):
        t = write_trace(tmp_path / "t.csv")
        with pytest.raises(ValueError, match="unique"):
            TracePlotSpec(traces=[(t, "x"), (t, "x")], out_path=tmp_path / "f.png")

    def test_no_traces_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="at least one"):
            TracePlotSpec(traces=[], out_path=tmp_path / "f.png")

    def test_rerender_is_byte_identical(self, tmp_path):
        t = write_trace(tmp_path / "t.csv")
        outs = []
        for name in ("a.png", "b.png"):
            spec = TracePlotSpec(traces=[(t, "run")], out_path=tmp_path / name)
            outs.append(plot_convergence(spec).read_bytes())
        assert outs[0] == outs[1]


class TestPlotNetwork:
    def test_single_ue_single_edge(self, tmp_path):
        scn = write_scenario(tmp_path / "s.json", L=1, K=1, Q=1)
        counts = plot_network(scn, tmp_path / "net.png")
        assert counts == {"n_aps": 1, "n_ues": 1, "n_edges": 1}

    def test_full_cooperation_complete_bipartite(self, tmp_path):
        scn = write_scenario(tmp_path / "s.json", L=3, K=4, Q=3)
        counts = plot_network(scn, tmp_path / "net.png")
        assert counts["n_edges"] == 3 * 4

    def test_missing_field_rejected(self, tmp_path):
        p = tmp_path / "s.json"
        p.write_text(json.dumps({"ap_positions": [[0, 0]]}))
        with pytest.raises(ValueError, match="ue_positions"):
            plot_network(p, tmp_path / "net.png")


class TestCli:
    def test_renders_artifact_dir(self, tmp_path, capsys):
        write_trace(tmp_path / "trace_fp.csv")
        write_trace(tmp_path / "trace_ao.csv", offset=0.1)
        write_scenario(tmp_path / "scenario.json")
        assert main([str(tmp_path)]) == 0
        assert (tmp_path / "convergence.png").exists()
        assert (tmp_path / "network.png").exists()

    def test_malformed_csv_nonzero_exit(self, tmp_path, capsys):
        (tmp_path / "trace_bad.csv").write_text("nope\n")
        assert main([str(tmp_path)]) == 2
        assert "header mismatch" in capsys.readouterr().err

    def test_empty_dir_nonzero_exit(self, tmp_path):
        assert main([str(tmp_path)]) == 2

    def test_svg_format(self, tmp_path):
        write_scenario(tmp_path / "scenario.json")
        assert main([str(tmp_path), "--format", "svg"]) == 0
        assert (tmp_path / "network.svg").exists()


@pytest.mark.skipif(not FULLSCALE.exists(),
                    reason="full-scale artifacts not generated yet")
def test_full_scale_figures(tmp_path):
    """Acceptance: three-curve convergence figure + 16/64/256 network plot."""
    traces = sorted(FULLSCALE.glob("trace_*.csv"))
    assert len(traces) == 3
    spec = TracePlotSpec(
        traces=[(p, p.stem.replace("trace_", "")) for p in traces],
        out_path=tmp_path / "convergence.png")
    out = plot_convergence(spec)
    three_curves = out.exists() and len(spec.records) == 3
    counts = plot_network(FULLSCALE / "scenario.json", tmp_path / "network.png")
    ok = (three_curves and counts["n_aps"] == 16 and counts["n_ues"] == 64
          and counts["n_edges"] == 256)
    print(f"[{'PASS' if ok else 'FAIL'}] figure rendering: three-curve "
          f"convergence: {three_curves}, network counts {counts}")
    assert ok
