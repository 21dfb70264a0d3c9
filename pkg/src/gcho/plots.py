"""Figure rendering for the benchmark CLI.

matplotlib is imported lazily (Agg backend) so library users never pay for
it; every figure lands next to the CSV files of the run it describes.
"""

from __future__ import annotations

from typing import Optional, Sequence


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_run_figures(out_dir, trace, records=None, fstar: Optional[float] = None) -> list:
    """Convergence and certificate figures for a single run.

    Writes fig_convergence.png always and fig_certificates.png when
    certificate records are present; returns the paths written.
    """
    plt = _pyplot()
    written = []

    f = trace.f_values()
    floor = fstar if fstar is not None else float(f.min())
    gaps = f - floor
    ks = range(len(f))
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.4))
    positive = gaps > 0
    if positive.any():
        ax1.semilogy([k for k, p in zip(ks, positive) if p], gaps[positive], "o-", ms=3)
    ax1.set_xlabel("iteration")
    ax1.set_ylabel("objective gap")
    ax1.set_title("objective decrease")
    steps = trace.step_norms()
    nz = steps > 0
    if nz.any():
        ax2.semilogy(
            [k for k, p in enumerate(nz) if p], steps[nz], "s-", ms=3, color="tab:orange"
        )
    ax2.set_xlabel("iteration")
    ax2.set_ylabel("step norm")
    ax2.set_title("step norms")
    fig.tight_layout()
    path = out_dir / "fig_convergence.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    if records:
        fig, ax = plt.subplots(figsize=(4.8, 3.4))
        ks = [r.k for r in records]
        sf = [max(r.stationarity, 1e-18) for r in records]
        ax.semilogy(ks, sf, "o-", ms=3)
        ax.set_xlabel("iteration")
        ax.set_ylabel("certificate subgradient distance")
        ax.set_title("certificate stationarity decay")
        fig.tight_layout()
        path = out_dir / "fig_certificates.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    return written


def render_table_figure(out_dir, rows: Sequence[dict]) -> list:
    """Grouped bar chart of iteration counts, min-max vs least-squares."""
    plt = _pyplot()
    names = [r["problem"] for r in rows]
    mm = [r["minmax_iters"] for r in rows]
    ls = [r["ls_iters"] for r in rows]
    x = range(len(names))
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    ax.bar([i - 0.2 for i in x], mm, width=0.4, label="min-max")
    ax.bar([i + 0.2 for i in x], ls, width=0.4, label="least-squares")
    ax.set_xticks(list(x))
    ax.set_xticklabels(names, rotation=30)
    ax.set_ylabel("iterations")
    ax.set_title("iterations by formulation")
    ax.legend()
    fig.tight_layout()
    path = out_dir / "fig_table1.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return [path]
