import json
import subprocess
import sys

import pytest

from figs.cli import main

from test_figs_render import hist_csv, sweep_csv

PAPER_CFG = """
[sweep]
l = 6
h_z = -0.5
beta_min = 0.1
beta_max = 10.0
beta_count = 4
configurations = nonpermuted

[rbm]
seeds = 2
d_list = 0.001

[spectrum]
l = 8
window_low = 0.1
window_high = 0.9
bins = 10
poly_degree = 5

[bounds]
instances = 3
lemma4_l = 5
lemma4_betas = 0.05
"""


class TestRenderCommand:
    def test_render_ok(self, tmp_path):
        out = tmp_path / "f.svg"
        rc = main(["render", "--kind", "beta_lines",
                   "--in", sweep_csv(tmp_path), "--out", str(out)])
        assert rc == 0
        assert out.exists()

    def test_bins_flag(self, tmp_path):
        out = tmp_path / "h.svg"
        rc = main(["render", "--kind", "spacing_hist",
                   "--in", hist_csv(tmp_path), "--out", str(out),
                   "--bins", "6"])
        assert rc == 0

    def test_schema_error_exit_code(self, tmp_path):
        rc = main(["render", "--kind", "spacing_hist",
                   "--in", sweep_csv(tmp_path),
                   "--out", str(tmp_path / "x.svg")])
        assert rc == 2

    def test_missing_file_exit_code(self, tmp_path):
        rc = main(["render", "--kind", "beta_lines",
                   "--in", str(tmp_path / "nope.csv"),
                   "--out", str(tmp_path / "x.svg")])
        assert rc == 2

    def test_deterministic_cli_reruns(self, tmp_path):
        src = sweep_csv(tmp_path)
        a, b = tmp_path / "a.svg", tmp_path / "b.svg"
        for out in (a, b):
            assert main(["render", "--kind", "bound_check",
                         "--in", src, "--out", str(out)]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestManifestCommand:
    def test_missing_manifest(self, tmp_path):
        assert main(["manifest", "--dir", str(tmp_path)]) == 2

    def test_empty_manifest(self, tmp_path):
        (tmp_path / "manifest.json").write_text('{"figures": []}')
        assert main(["manifest", "--dir", str(tmp_path)]) == 2


@pytest.fixture(scope="module")
def paper_dir(tmp_path_factory):
    """Run the primary CLI's paper pipeline through its console entry point."""
    root = tmp_path_factory.mktemp("paper")
    cfg = root / "cfg.ini"
    cfg.write_text(PAPER_CFG)
    out = root / "out"
    proc = subprocess.run(
        [sys.executable, "-m", "petzchain.cli", "paper",
         "--config", str(cfg), "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return out


class TestPipelineIntegration:
    def test_manifest_renders_full_set(self, paper_dir):
        rc = main(["manifest", "--dir", str(paper_dir)])
        assert rc == 0
        manifest = json.loads((paper_dir / "manifest.json").read_text())
        for entry in manifest["figures"]:
            assert (paper_dir / entry["output"]).stat().st_size > 0

    def test_bound_check_cmi_above_rhs(self, paper_dir):
        # The data obligation behind the bound_check figure: the CMI curve is
        # pointwise above the operator-norm lower bound.
        import numpy as np

        from figs.reader import read_table

        t = read_table(paper_dir / "sweep.csv", expect_schema="sweep")
        cmi = np.array(t.floats("cmi_bits"))
        d_op = np.array(t.floats("opnorm_distance"))
        rhs = -2.0 * np.log2(1.0 - d_op**2 / 4.0)
        assert np.all(cmi >= rhs - 1e-8)
