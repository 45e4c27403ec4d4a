import numpy as np
import pytest

from figs.reader import SchemaError
from figs.render import FigureSpec, _rebin, render

SWEEP_HEADER = ("# petzchain-csv sweep v1\n"
                "L,h_z,beta,configuration,cmi_bits,fidelity,trace_distance,"
                "opnorm_distance,fr_bound_margin,figbound_margin,"
                "recovered_trace,wall_time_s\n")


def sweep_csv(tmp_path, n_beta=6, h_z_values=(-0.5,), confs=("nonpermuted",)):
    lines = [SWEEP_HEADER]
    for h_z in h_z_values:
        for conf in confs:
            for beta in np.geomspace(0.01, 100.0, n_beta):
                cmi = 0.4 * (1.0 - np.exp(-beta))
                d_op = 0.1 * (1.0 - np.exp(-beta))
                lines.append(f"8,{h_z},{beta:.6g},{conf},{cmi:.6g},0.99,"
                             f"0.02,{d_op:.6g},0.1,0.1,1,\n")
    p = tmp_path / "sweep.csv"
    p.write_text("".join(lines))
    return str(p)


def hist_csv(tmp_path, bins=12, groups=((12, -0.5, "even"),)):
    lines = ["# petzchain-csv spectrum_hist v1\n",
             "L,h_z,sector,s_left,s_right,density\n"]
    edges = np.linspace(0.0, 3.0, bins + 1)
    for L, h_z, sector in groups:
        dens = (np.pi * edges[:-1] / 2.0) * np.exp(-np.pi * edges[:-1]**2 / 4)
        for i in range(bins):
            lines.append(f"{L},{h_z},{sector},{edges[i]:.6g},"
                         f"{edges[i + 1]:.6g},{dens[i]:.6g}\n")
    p = tmp_path / "spectrum_hist.csv"
    p.write_text("".join(lines))
    return str(p)


class TestFigureSpec:
    def test_rejects_unknown_kind(self):
        with pytest.raises(ValueError):
            FigureSpec("pie", "a.csv", "a.svg")

    def test_rejects_bad_bins(self):
        with pytest.raises(ValueError):
            FigureSpec("spacing_hist", "a.csv", "a.svg", bins=0)


class TestRenderKinds:
    def test_beta_lines(self, tmp_path):
        out = tmp_path / "f.svg"
        render(FigureSpec("beta_lines", sweep_csv(tmp_path), str(out)))
        assert out.stat().st_size > 0
        assert out.read_bytes().startswith(b"<?xml")

    def test_beta_lines_single_row(self, tmp_path):
        out = tmp_path / "one.svg"
        render(FigureSpec("beta_lines", sweep_csv(tmp_path, n_beta=1),
                          str(out)))
        assert out.exists()

    def test_beta_hz_heatmap(self, tmp_path):
        src = sweep_csv(tmp_path, n_beta=5, h_z_values=(-1.0, -0.5, 0.0))
        out = tmp_path / "heat.svg"
        render(FigureSpec("beta_hz_heatmap", src, str(out)))
        assert out.stat().st_size > 0

    def test_spacing_hist(self, tmp_path):
        out = tmp_path / "hist.svg"
        render(FigureSpec("spacing_hist", hist_csv(tmp_path), str(out)))
        assert out.stat().st_size > 0

    def test_spacing_hist_multi_group_and_rebin(self, tmp_path):
        src = hist_csv(tmp_path, bins=12,
                       groups=((12, -0.5, "even"), (12, 0.0, "even")))
        out = tmp_path / "hist2.svg"
        render(FigureSpec("spacing_hist", src, str(out), bins=6))
        assert out.stat().st_size > 0

    def test_bound_check(self, tmp_path):
        out = tmp_path / "bound.svg"
        render(FigureSpec("bound_check", sweep_csv(tmp_path), str(out)))
        assert out.stat().st_size > 0

    def test_linear_x(self, tmp_path):
        out = tmp_path / "lin.svg"
        render(FigureSpec("beta_lines", sweep_csv(tmp_path), str(out),
                          log_x=False))
        assert out.stat().st_size > 0


class TestErrors:
    def test_wrong_schema_for_kind(self, tmp_path):
        with pytest.raises(SchemaError):
            render(FigureSpec("spacing_hist", sweep_csv(tmp_path),
                              str(tmp_path / "x.svg")))

    def test_missing_column_named(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("# petzchain-csv sweep v1\nbeta,h_z\n0.1,-0.5\n")
        with pytest.raises(SchemaError, match="configuration"):
            render(FigureSpec("beta_lines", str(p), str(tmp_path / "x.svg")))

    def test_empty_table(self, tmp_path):
        p = tmp_path / "empty.csv"
        p.write_text(SWEEP_HEADER)
        with pytest.raises(SchemaError, match="no data rows"):
            render(FigureSpec("beta_lines", str(p), str(tmp_path / "x.svg")))

    def test_input_not_mutated(self, tmp_path):
        src = sweep_csv(tmp_path)
        before = open(src, "rb").read()
        render(FigureSpec("beta_lines", src, str(tmp_path / "f.svg")))
        assert open(src, "rb").read() == before


def test_rebin_conserves_mass():
    lefts = np.linspace(0.0, 2.0, 11)[:-1]
    rights = np.linspace(0.0, 2.0, 11)[1:]
    density = np.linspace(1.0, 0.0, 10)
    l2, r2, d2 = _rebin(lefts, rights, density, 5)
    assert len(d2) == 5
    before = float((density * (rights - lefts)).sum())
    after = float((d2 * (r2 - l2)).sum())
    assert after == pytest.approx(before, abs=1e-12)


def test_deterministic_output(tmp_path):
    src = sweep_csv(tmp_path)
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    render(FigureSpec("beta_lines", src, str(a)))
    render(FigureSpec("beta_lines", src, str(b)))
    assert a.read_bytes() == b.read_bytes()
