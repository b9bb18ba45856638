"""Figures for the report path.  Each function writes one PNG and returns its path."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def plot_gates(results, path) -> Path:
    """log10(error / gate) per gate; bars left of zero pass."""
    path = Path(path)
    names = [r.name for r in results]
    ratio = [math.log10(max(r.error, 1e-300) / r.tol) if r.tol else 0.0 for r in results]
    colors = ["tab:green" if r.passed else "tab:red" for r in results]
    fig, ax = plt.subplots(figsize=(7, 0.45 * len(names) + 1.2))
    ax.barh(names, ratio, color=colors)
    ax.axvline(0, color="k", lw=0.8)
    ax.set_xlabel("log10(error / gate)")
    ax.invert_yaxis()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_bessel_arch(y, values, err, path, title: str = "") -> Path:
    path = Path(path)
    y = np.asarray(y, dtype=float)
    values = np.asarray(values, dtype=complex)
    fig, (a1, a2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    a1.plot(y, values.real, ".-", label="Re")
    a1.plot(y, values.imag, ".-", label="Im")
    a1.legend()
    a1.set_ylabel("B(y)")
    a2.semilogy(np.abs(y), np.maximum(np.abs(values), 1e-300), ".-", label="|B|")
    a2.semilogy(np.abs(y), np.maximum(np.asarray(err, dtype=float), 1e-300), "--", label="error estimate")
    a2.set_xlabel("y")
    a2.legend()
    if title:
        a1.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_voronoi(reports, path) -> Path:
    """LHS against RHS in the complex plane plus relative errors, one point per (q, a)."""
    path = Path(path)
    fig, (a1, a2) = plt.subplots(1, 2, figsize=(10, 4))
    labels = [f"q={r['q']}, a={r['a']}" for r in reports]
    for r, lab in zip(reports, labels):
        a1.plot(*r["lhs"], "o", mfc="none", ms=10)
        a1.plot(*r["rhs"], "x", ms=8, label=lab)
    a1.set_xlabel("Re")
    a1.set_ylabel("Im")
    a1.set_title("LHS (circles) and RHS (crosses)")
    a1.legend(fontsize=8)
    x = np.arange(len(reports))
    a2.semilogy(x, [max(r["rel_err"], 1e-300) for r in reports], "o-", label="relative error")
    a2.semilogy(x, [max(r["tails"]["relative"], 1e-300) for r in reports], "s--", label="tail estimate")
    a2.set_xticks(x, labels, rotation=20)
    a2.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
