"""Figure rendering for the command-line report paths.

Every file-producing command can drop a PNG next to its delimited output.
Figures are rendered on the Agg backend with date metadata stripped so that
identical runs produce identical bytes.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

_SAVE_KW = {"dpi": 130, "metadata": {"Software": None, "Date": None}}


def _new_axes(title: str, xlabel: str, ylabel: str):
    fig, ax = plt.subplots(figsize=(7.2, 4.45))
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    return fig, ax


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def plot_eigen_records(records: list[dict], path) -> None:
    """Signed eigenvalues against the geometric envelope, log magnitude."""
    fig, ax = _new_axes(
        "Transfer-operator eigenvalues", "index n", r"$|\lambda_n|$"
    )
    ns = [r["n"] for r in records]
    mags = [abs(float(r["lambda"])) for r in records]
    ax.semilogy(ns, mags, "o-", label=r"$|\lambda_n|$ (computed)")
    phim2 = ((1 + math.sqrt(5)) / 2) ** -2
    ax.semilogy(ns, [phim2**n for n in ns], "--", label=r"$\varphi^{-2n}$ envelope")
    ax.legend()
    _finish(fig, path)


def plot_layer_decay(n: int, layers: list[float], path) -> None:
    """Layer magnitudes |W_v| for one eigenvalue index."""
    fig, ax = _new_axes(
        f"Layer decomposition, n = {n}", "layer v", r"$|W_v(n)|$"
    )
    vs = list(range(len(layers)))
    ax.semilogy(vs, [abs(w) for w in layers], "o-", ms=3.5)
    if len(layers) > 2:
        ax.semilogy(vs[1:], [abs(layers[1]) / (v * v) for v in vs[1:]], "--",
                    label=r"$|W_1|/v^2$ guide")
        ax.legend()
    _finish(fig, path)


def plot_oracle_spectrum(N: int, values: list[float], path) -> None:
    fig, ax = _new_axes(
        f"Truncation spectrum, N = {N}", "index n", r"$|\lambda_n|$"
    )
    ns = list(range(1, len(values) + 1))
    ax.semilogy(ns, [abs(v) for v in values], "s-", ms=4)
    _finish(fig, path)


def plot_asympt(rows: list[dict], path) -> None:
    """c(n) trend against its proven band."""
    fig, ax = _new_axes("Eigenvalue asymptotics", "index n", "c(n)")
    ns = [r["n"] for r in rows]
    cs = [float(r["c_n"]) for r in rows]
    ax.plot(ns, cs, "o-", label="c(n)")
    ax.axhline(0.4, color="tab:red", ls=":", label="band 0.4 .. 1.7")
    ax.axhline(1.7, color="tab:red", ls=":")
    ax.set_ylim(0.0, 2.0)
    ax.legend()
    _finish(fig, path)


def plot_kernel_row(ell: int, js: list[int], values: list[float], path) -> None:
    fig, ax = _new_axes(
        f"Kernel row, l = {ell}", "index j", r"$K(j,\ell)$"
    )
    ax.semilogy(js, values, "o-", ms=3.5)
    ax.axvline(ell, color="tab:gray", ls=":", label="diagonal j = l")
    ax.legend()
    _finish(fig, path)


def plot_residuals(label: str, xs: list[int], residuals: list[float], path) -> None:
    fig, ax = _new_axes(f"Identity residuals: {label}", "truncation", "residual")
    ax.semilogy(xs, residuals, "o-", ms=4)
    _finish(fig, path)


def plot_decomposition(matrix: dict, path) -> None:
    """Log-magnitude heatmap of the trace-decomposition table."""
    import numpy as np

    n_max, l_max = matrix["n_max"], matrix["l_max"]
    grid = np.zeros((n_max, l_max))
    for (n, ell), v in matrix["cells"].items():
        x = abs(float(v))
        grid[n - 1, ell - 1] = math.log10(x) if x > 0 else -60.0
    fig, ax = plt.subplots(figsize=(6.4, 5.2))
    im = ax.imshow(grid, aspect="auto", origin="upper", cmap="viridis",
                   extent=(0.5, l_max + 0.5, n_max + 0.5, 0.5))
    ax.set_title("Trace decomposition, log10 magnitude")
    ax.set_xlabel("column l")
    ax.set_ylabel("row n")
    fig.colorbar(im, ax=ax, label=r"$\log_{10}$ entry")
    _finish(fig, path)
