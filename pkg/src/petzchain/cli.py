"""Configuration-driven batch runner emitting deterministic CSV.

Subcommands: sweep | rbm | spectrum | bounds | paper. Config files are INI
text with one section per subcommand; every key has a default mirroring the
reference parameters (alpha=1.0, j_x=1.05, h_z=-0.5, L=8, the 8-site permuted
blocks). Output is byte-identical for a fixed (config, seed).

Exit codes: 0 success, 1 bound violation, 2 configuration error,
3 resource refusal.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import bounds as bnd
from . import rbm as rbm_mod
from .hilbert import Partition
from .linops import eigh, root_fidelity
from .petz import DEFAULT_BLOCKS, PERMUTED_BLOCKS, recovery_report
from .spectral import (
    SpectrumSample,
    ks_distance,
    poisson_spacing_cdf,
    spacing_ratios,
    unfolded_spacings,
    wigner_surmise_cdf,
)
from .spinchain import ChainParams, ResourceGuardError, parity_sector_hamiltonian
from .thermal import GibbsSpec, gibbs_from_spectrum, gibbs_state

SCHEMA_VERSION = 1

SWEEP_COLUMNS = [
    "L", "h_z", "beta", "configuration", "cmi_bits", "fidelity",
    "trace_distance", "opnorm_distance", "fr_bound_margin", "figbound_margin",
    "recovered_trace", "wall_time_s",
]
RBM_COLUMNS = [
    "seed", "dims", "beta", "D", "exact_cmi", "perturbative_cmi",
    "paper_formula_cmi", "abs_error", "fidelity", "fr_bound_margin",
]
SPECTRUM_COLUMNS = [
    "L", "h_z", "sector", "mean_gap_ratio", "ks_vs_wigner", "ks_vs_poisson",
    "retained_levels",
]
SPECTRUM_HIST_COLUMNS = ["L", "h_z", "sector", "s_left", "s_right", "density"]
BOUNDS_COLUMNS = ["lemma", "check", "instance", "cmi_bits", "lhs", "bound",
                  "margin", "asserted"]

MARGIN_FLOOR = -1e-8


class ConfigError(ValueError):
    pass


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".12g")


def write_csv(path: str | Path, schema: str, columns: list[str],
              rows: list[list]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# petzchain-csv {schema} v{SCHEMA_VERSION}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.replace(",", " ").split()]


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.replace(",", " ").split()]


def load_config(path: str | None) -> configparser.ConfigParser:
    cp = configparser.ConfigParser()
    if path:
        read = cp.read(path)
        if not read:
            raise ConfigError(f"config file {path!r} not found or unreadable")
    return cp


def _get(cp, section, key, default) -> str:
    if cp.has_option(section, key):
        return cp.get(section, key)
    return default


def beta_grid(kind: str, lo: float, hi: float, count: int) -> np.ndarray:
    if count < 1 or lo > hi:
        raise ConfigError("beta grid must be non-empty with min <= max")
    if kind == "geometric":
        if lo <= 0:
            raise ConfigError("geometric beta grid needs min > 0")
        return np.geomspace(lo, hi, count)
    if kind == "linear":
        return np.linspace(lo, hi, count)
    raise ConfigError(f"unknown beta grid kind {kind!r}")


def _chain_blocks(L: int, configuration: str, cp, section: str) -> Partition:
    custom = {}
    for label, key in (("A", "a_sites"), ("B", "b_sites"), ("C", "c_sites")):
        opt = f"{configuration}_{key}"
        if cp.has_option(section, opt):
            custom[label] = tuple(_ints(cp.get(section, opt)))
    if custom:
        if set(custom) != {"A", "B", "C"}:
            raise ConfigError(
                f"custom blocks for {configuration!r} must give all of A, B, C"
            )
        blocks = custom
    elif configuration == "nonpermuted":
        if L == 8:
            blocks = DEFAULT_BLOCKS
        elif L >= 5:
            blocks = {"A": (0, 1), "B": tuple(range(2, L - 2)),
                      "C": (L - 2, L - 1)}
        else:
            raise ConfigError(f"no default blocks for L={L}; configure them")
    elif configuration == "permuted":
        if L != 8:
            raise ConfigError(
                "the permuted configuration defaults to the 8-site relabeling;"
                f" configure custom blocks for L={L}"
            )
        blocks = PERMUTED_BLOCKS
    else:
        raise ConfigError(f"unknown configuration {configuration!r}")
    return Partition.chain(L, blocks["A"], blocks["B"], blocks["C"])


def run_sweep(cp: configparser.ConfigParser, out: str, workers: int,
              max_l: int, timing: bool) -> list[list]:
    sec = "sweep"
    alpha = float(_get(cp, sec, "alpha", "1.0"))
    j_x = float(_get(cp, sec, "j_x", "1.05"))
    h_z_values = _floats(_get(cp, sec, "h_z", "-0.5, 0.0"))
    l_values = _ints(_get(cp, sec, "l", "8"))
    kind = _get(cp, sec, "beta_kind", "geometric")
    grid = beta_grid(kind, float(_get(cp, sec, "beta_min", "0.01")),
                     float(_get(cp, sec, "beta_max", "100.0")),
                     int(_get(cp, sec, "beta_count", "40")))
    configurations = _get(cp, sec, "configurations",
                          "nonpermuted, permuted").replace(",", " ").split()
    lam = float(_get(cp, sec, "lambda", "0.0"))
    if not h_z_values or not l_values or not configurations:
        raise ConfigError("sweep grids must be non-empty")

    rows: list[list] = []
    for L in sorted(l_values):
        if L > max_l:
            est_gib = (1 << (2 * L)) * 16 / 2**30
            raise ResourceGuardError(
                f"L={L} exceeds --max-L {max_l} (~{est_gib:.2f} GiB dense)"
            )
        for h_z in sorted(h_z_values):
            params = ChainParams(L, alpha=alpha, h_z=h_z, j_x=j_x)
            from .spinchain import build_hamiltonian

            spectrum = eigh(build_hamiltonian(params, max_l=max_l))
            for configuration in sorted(configurations):
                partition = _chain_blocks(L, configuration, cp, sec)

                def one(beta: float) -> list:
                    t0 = time.perf_counter()
                    rho = gibbs_from_spectrum(spectrum, beta, partition)
                    rep = recovery_report(rho, partition, lam=lam)
                    wall = f"{time.perf_counter() - t0:.3f}" if timing else ""
                    return [L, h_z, beta, configuration, rep.cmi, rep.fidelity,
                            rep.trace_distance, rep.opnorm_distance,
                            rep.fr_bound_margin, rep.figbound_margin,
                            rep.recovered_trace, wall]

                if workers > 1:
                    with ThreadPoolExecutor(max_workers=workers) as pool:
                        rows.extend(pool.map(one, sorted(grid)))
                else:
                    rows.extend(one(b) for b in sorted(grid))
    write_csv(out, "sweep", SWEEP_COLUMNS, rows)
    return rows


def run_rbm(cp: configparser.ConfigParser, out: str, seed: int) -> list[list]:
    sec = "rbm"
    dims = tuple(_ints(_get(cp, sec, "dims", "2, 2, 2")))
    if len(dims) != 3:
        raise ConfigError("rbm dims must have three factors")
    beta = float(_get(cp, sec, "beta", "1.0"))
    offset = float(_get(cp, sec, "offset", "0.0"))
    n_seeds = int(_get(cp, sec, "seeds", "20"))
    d_list = _floats(_get(cp, sec, "d_list", "0.01, 0.005, 0.0025, 0.001"))
    lam = 0.0

    rows: list[list] = []
    for k in range(n_seeds):
        inst_seed = seed + k
        r = rbm_mod.sample_band_matrix(int(np.prod(dims)), inst_seed)
        for d_val in d_list:
            model = rbm_mod.BandModel(dims, offset=offset, strength=d_val,
                                      beta=beta, seed=inst_seed)
            exact = rbm_mod.exact_cmi(model, r)
            pert = rbm_mod.perturbative_cmi(r, model)
            paper = rbm_mod.paper_formula_cmi(r, model)
            rho = gibbs_state(
                GibbsSpec(offset * np.eye(model.dim) + d_val * r, beta),
                model.partition,
            )
            rep = recovery_report(rho, model.partition, lam=lam)
            rows.append([
                inst_seed, "x".join(str(d) for d in dims), beta, d_val, exact,
                pert, paper, abs(exact - pert), rep.fidelity,
                rep.fr_bound_margin,
            ])
    write_csv(out, "rbm", RBM_COLUMNS, rows)
    return rows


def run_spectrum(cp: configparser.ConfigParser, out: str,
                 max_l: int) -> list[list]:
    sec = "spectrum"
    L = int(_get(cp, sec, "l", "12"))
    if L > max_l:
        raise ResourceGuardError(f"L={L} exceeds --max-L {max_l}")
    alpha = float(_get(cp, sec, "alpha", "1.0"))
    j_x = float(_get(cp, sec, "j_x", "1.05"))
    h_z_values = _floats(_get(cp, sec, "h_z", "-0.5, 0.0"))
    sector = _get(cp, sec, "sector", "even")
    lo = float(_get(cp, sec, "window_low", "0.25"))
    hi = float(_get(cp, sec, "window_high", "0.75"))
    bins = int(_get(cp, sec, "bins", "30"))
    degree = int(_get(cp, sec, "poly_degree", "7"))

    rows: list[list] = []
    hist_rows: list[list] = []
    for h_z in sorted(h_z_values):
        params = ChainParams(L, alpha=alpha, h_z=h_z, j_x=j_x)
        block = parity_sector_hamiltonian(params, sector)
        sample = SpectrumSample(np.linalg.eigvalsh(block), (lo, hi))
        _, mean_ratio = spacing_ratios(sample)
        spacings = unfolded_spacings(sample, poly_degree=degree)
        ks_w = ks_distance(spacings, wigner_surmise_cdf)
        ks_p = ks_distance(spacings, poisson_spacing_cdf)
        rows.append([L, h_z, sector, mean_ratio, ks_w, ks_p, len(sample.retained())])
        density, edges = np.histogram(spacings, bins=bins, density=True)
        for i in range(bins):
            hist_rows.append([L, h_z, sector, edges[i], edges[i + 1], density[i]])
    write_csv(out, "spectrum", SPECTRUM_COLUMNS, rows)
    hist_path = Path(out).with_name(Path(out).stem + "_hist.csv")
    write_csv(hist_path, "spectrum_hist", SPECTRUM_HIST_COLUMNS, hist_rows)
    return rows


def run_bounds(cp: configparser.ConfigParser, out: str, seed: int) -> list[list]:
    sec = "bounds"
    instances = int(_get(cp, sec, "instances", "100"))
    n_qubits = int(_get(cp, sec, "qubits", "3"))
    lemma4_betas = _floats(_get(cp, sec, "lemma4_betas", "0.01, 0.05, 0.1"))
    lemma4_l = int(_get(cp, sec, "lemma4_l", "6"))
    dim = 1 << n_qubits
    third = n_qubits // 3
    if n_qubits < 3:
        raise ConfigError("bounds instances need at least 3 qubits")
    partition = Partition.chain(
        n_qubits,
        tuple(range(third)),
        tuple(range(third, n_qubits - third)),
        tuple(range(n_qubits - third, n_qubits)),
    )

    rows: list[list] = []
    violated = False
    for i in range(instances):
        rng = np.random.default_rng((seed, i))
        rho_mat = bnd.random_density(dim, rng)
        from .hilbert import DensityMatrix

        rho = DensityMatrix(rho_mat, partition, check=False)
        ch = bnd.random_channel(dim, kraus_rank=2, rng=rng)
        m1 = bnd.check_lemma1(rho, partition, ch)
        fid_bound = 2.0 ** (-m1.cmi / 2.0)
        rows.append(["lemma1", "fidelity", i, m1.cmi,
                     fid_bound + m1.fidelity_margin, fid_bound,
                     m1.fidelity_margin, 1])
        rows.append(["lemma1", "trace", i, m1.cmi, m1.eps_safe - m1.trace_margin,
                     m1.eps_safe, m1.trace_margin, 1])
        u1 = bnd.random_unitary(dim, rng)
        u2 = bnd.random_unitary(dim, rng)
        m2 = bnd.check_lemma2(rho, partition, u1, u2)
        rows.append(["lemma2", "trace", i, m1.cmi, m2.lhs,
                     m2.eps_safe + m2.delta_upper, m2.margin, 1])
        obs_raw = rng.standard_normal((dim, dim)) \
            + 1j * rng.standard_normal((dim, dim))
        obs = (obs_raw + obs_raw.conj().T) / 2.0
        m3 = bnd.check_lemma3(rho, partition, obs)
        rows.append(["lemma3", "holder", i, m1.cmi, m3.lhs, m3.bound,
                     m3.margin, 1])
        for m in (m1.fidelity_margin, m1.trace_margin, m2.margin, m3.margin):
            if m < MARGIN_FLOOR:
                violated = True

    from .spinchain import build_hamiltonian

    h = build_hamiltonian(ChainParams(lemma4_l))
    p4 = _chain_blocks(lemma4_l, "nonpermuted", cp, sec)
    for j, beta in enumerate(lemma4_betas):
        rep = bnd.check_lemma4(h, p4, beta)
        rows.append(["lemma4", "hamiltonian_gap", j, "", rep.hamiltonian_gap,
                     rep.bound, rep.bound - rep.hamiltonian_gap, 0])
    write_csv(out, "bounds", BOUNDS_COLUMNS, rows)
    if violated:
        raise BoundViolation("an asserted lemma margin fell below -1e-8")
    return rows


class BoundViolation(RuntimeError):
    pass


def run_paper(cp: configparser.ConfigParser, out_dir: str, workers: int,
              seed: int, max_l: int) -> None:
    """Full desk-scale reproduction pipeline plus a figure manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    run_sweep(cp, str(out / "sweep.csv"), workers, max_l, timing=False)
    heat = configparser.ConfigParser()
    heat.add_section("sweep")
    heat.set("sweep", "h_z", ", ".join(
        _fmt(v) for v in np.linspace(-1.0, 0.0, 9)))
    heat.set("sweep", "beta_count", _get(cp, "sweep", "beta_count", "40"))
    run_sweep(heat, str(out / "sweep_hz.csv"), workers, max_l, timing=False)
    run_rbm(cp, str(out / "rbm.csv"), seed)
    run_spectrum(cp, str(out / "spectrum.csv"), max_l)
    try:
        run_bounds(cp, str(out / "bounds.csv"), seed)
    finally:
        manifest = {
            "figures": [
                {"kind": "spacing_hist", "input": "spectrum_hist.csv",
                 "output": "fig_level_spacings.svg"},
                {"kind": "beta_lines", "input": "sweep.csv",
                 "output": "fig_cmi_opnorm_vs_beta.svg"},
                {"kind": "bound_check", "input": "sweep.csv",
                 "output": "fig_bound_check.svg"},
                {"kind": "beta_hz_heatmap", "input": "sweep_hz.csv",
                 "output": "fig_beta_hz_heatmap.svg"},
            ]
        }
        with open(out / "manifest.json", "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2)
            fh.write("\n")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="petzchain",
                                 description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("sweep", "rbm", "spectrum", "bounds", "paper"):
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="INI config file")
        p.add_argument("--out", required=True,
                       help="output CSV path (directory for 'paper')")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--max-L", type=int, default=14, dest="max_l")
        if name == "sweep":
            p.add_argument("--timing", action="store_true",
                           help="record wall times (breaks byte-identical reruns)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cp = load_config(args.config)
        if args.command == "sweep":
            run_sweep(cp, args.out, args.workers, args.max_l, args.timing)
        elif args.command == "rbm":
            run_rbm(cp, args.out, args.seed)
        elif args.command == "spectrum":
            run_spectrum(cp, args.out, args.max_l)
        elif args.command == "bounds":
            run_bounds(cp, args.out, args.seed)
        elif args.command == "paper":
            run_paper(cp, args.out, args.workers, args.seed, args.max_l)
    except BoundViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, configparser.Error, ValueError) as exc:
        if isinstance(exc, ResourceGuardError):
            print(f"refused: {exc}", file=sys.stderr)
            return 3
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
