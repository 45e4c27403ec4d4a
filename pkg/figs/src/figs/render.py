"""The four figure kinds rendered from petzchain CSV tables.

Kinds:
  beta_lines      CMI and operator-norm distance vs beta, one line per
                  (h_z, configuration) group (sweep schema).
  beta_hz_heatmap CMI over the (beta, h_z) plane (sweep schema).
  spacing_hist    pre-binned level-spacing histogram with the Wigner-surmise
                  overlay and an exp(-s) reference (spectrum_hist schema).
  bound_check     CMI curve against the operator-norm lower bound
                  -2 log2(1 - d_op^2/4) per group (sweep schema).

Output is deterministic for fixed input: fixed style, no timestamps, fixed
SVG hash salt.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .reader import SchemaError, Table, read_table  # noqa: E402

KINDS = ("beta_lines", "beta_hz_heatmap", "spacing_hist", "bound_check")

KIND_SCHEMAS = {
    "beta_lines": "sweep",
    "beta_hz_heatmap": "sweep",
    "spacing_hist": "spectrum_hist",
    "bound_check": "sweep",
}

_STYLE = {
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 100,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "svg.hashsalt": "petzchain-figs",
}


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    input_path: str
    output_path: str
    log_x: bool = True
    bins: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; "
                             f"choose from {', '.join(KINDS)}")
        if self.bins is not None and self.bins < 1:
            raise ValueError("bins must be >= 1")


def _save(fig, path: str) -> None:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, metadata={"Date": None}, bbox_inches="tight")
    plt.close(fig)


def _sorted_by_beta(group: Table) -> tuple[np.ndarray, Table]:
    betas = np.array(group.floats("beta"))
    order = np.argsort(betas, kind="stable")
    rows = tuple(group.rows[i] for i in order)
    return betas[order], Table(group.schema, group.columns, rows)


def render_beta_lines(table: Table, spec: FigureSpec) -> None:
    groups = table.groups("h_z", "configuration")
    with plt.rc_context(_STYLE):
        fig, (ax_cmi, ax_op) = plt.subplots(2, 1, sharex=True,
                                            figsize=(6.4, 5.6))
        for (h_z, conf), group in sorted(groups.items()):
            betas, g = _sorted_by_beta(group)
            label = f"h_z={h_z}, {conf}"
            ax_cmi.plot(betas, g.floats("cmi_bits"), marker=".", label=label)
            ax_op.plot(betas, g.floats("opnorm_distance"), marker=".",
                       label=label)
        if spec.log_x:
            ax_cmi.set_xscale("log")
        ax_cmi.set_ylabel("CMI [bits]")
        ax_op.set_ylabel(r"$\|\rho - \tilde\rho\|_\infty$")
        ax_op.set_xlabel(r"$\beta$")
        ax_cmi.legend(fontsize=7)
        _save(fig, spec.output_path)


def render_beta_hz_heatmap(table: Table, spec: FigureSpec) -> None:
    confs = sorted(set(table.column("configuration")))
    conf = "nonpermuted" if "nonpermuted" in confs else confs[0]
    sub = table.groups("configuration")[(conf,)]
    betas = np.array(sorted(set(sub.floats("beta"))))
    hzs = np.array(sorted(set(sub.floats("h_z"))))
    grid = np.full((len(hzs), len(betas)), np.nan)
    b_idx = {b: i for i, b in enumerate(betas)}
    h_idx = {h: i for i, h in enumerate(hzs)}
    for row in sub.rows:
        grid[h_idx[float(row["h_z"])], b_idx[float(row["beta"])]] = \
            float(row["cmi_bits"])
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        x = np.log10(betas) if spec.log_x else betas
        mesh = ax.pcolormesh(x, hzs, grid, shading="nearest")
        fig.colorbar(mesh, ax=ax, label="CMI [bits]")
        ax.set_xlabel(r"$\log_{10}\beta$" if spec.log_x else r"$\beta$")
        ax.set_ylabel(r"$h_z$")
        ax.set_title(f"configuration: {conf}", fontsize=9)
        _save(fig, spec.output_path)


def _rebin(lefts, rights, density, n_out: int):
    """Merge adjacent pre-binned cells into n_out width-weighted groups."""
    n = len(density)
    if n_out >= n:
        return lefts, rights, density
    cuts = np.linspace(0, n, n_out + 1).round().astype(int)
    out_l, out_r, out_d = [], [], []
    for a, b in zip(cuts[:-1], cuts[1:]):
        if a == b:
            continue
        widths = rights[a:b] - lefts[a:b]
        out_l.append(lefts[a])
        out_r.append(rights[b - 1])
        out_d.append(float((density[a:b] * widths).sum() / widths.sum()))
    return np.array(out_l), np.array(out_r), np.array(out_d)


def render_spacing_hist(table: Table, spec: FigureSpec) -> None:
    groups = table.groups("L", "h_z", "sector")
    with plt.rc_context(_STYLE):
        fig, axes = plt.subplots(1, len(groups), squeeze=False,
                                 figsize=(4.0 * len(groups), 3.4))
        for ax, (key, group) in zip(axes[0], sorted(groups.items())):
            lefts = np.array(group.floats("s_left"))
            rights = np.array(group.floats("s_right"))
            density = np.array(group.floats("density"))
            if spec.bins is not None:
                lefts, rights, density = _rebin(lefts, rights, density,
                                                spec.bins)
            ax.bar(lefts, density, width=rights - lefts, align="edge",
                   alpha=0.6, label="data")
            s = np.linspace(0.0, max(float(rights[-1]), 3.0), 400)
            ax.plot(s, (np.pi * s / 2.0) * np.exp(-np.pi * s**2 / 4.0),
                    label="Wigner surmise")
            ax.plot(s, np.exp(-s), linestyle="--", label=r"$e^{-s}$")
            ax.set_xlabel("s")
            ax.set_ylabel("P(s)")
            ax.set_title(f"L={key[0]}, h_z={key[1]}, {key[2]}", fontsize=9)
            ax.legend(fontsize=7)
        _save(fig, spec.output_path)


def render_bound_check(table: Table, spec: FigureSpec) -> None:
    groups = table.groups("h_z", "configuration")
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for (h_z, conf), group in sorted(groups.items()):
            betas, g = _sorted_by_beta(group)
            cmi = np.array(g.floats("cmi_bits"))
            d_op = np.array(g.floats("opnorm_distance"))
            rhs = -2.0 * np.log2(np.clip(1.0 - d_op**2 / 4.0, 1e-300, None))
            line, = ax.plot(betas, cmi, label=f"CMI h_z={h_z}, {conf}")
            ax.plot(betas, rhs, linestyle="--", color=line.get_color(),
                    label=f"bound h_z={h_z}, {conf}")
        if spec.log_x:
            ax.set_xscale("log")
        ax.set_xlabel(r"$\beta$")
        ax.set_ylabel("bits")
        ax.legend(fontsize=7)
        _save(fig, spec.output_path)


_RENDERERS = {
    "beta_lines": render_beta_lines,
    "beta_hz_heatmap": render_beta_hz_heatmap,
    "spacing_hist": render_spacing_hist,
    "bound_check": render_bound_check,
}


def render(spec: FigureSpec) -> None:
    """Read the input CSV, validate its schema, and write the figure."""
    table = read_table(spec.input_path, expect_schema=KIND_SCHEMAS[spec.kind])
    if not table.rows:
        raise SchemaError(f"{spec.input_path}: no data rows")
    _RENDERERS[spec.kind](table, spec)
