"""Campaign reports: delimited ECDF/p-value tables plus SVG figures."""

from __future__ import annotations

import csv
import itertools
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

import numpy as np  # noqa: E402

from .harness import _per_run_errors, pairwise_pvalues  # noqa: E402
from .stats import ecdf_eval, summarize_pvalues  # noqa: E402


def condition_labels(samples) -> list[str]:
    return sorted({s.condition for s in samples})


def noise_differences(samples, baseline: str = "A") -> list[float]:
    """Per-scene |error difference| across all unordered baseline run pairs."""
    runs = _per_run_errors(samples, baseline)
    if len(runs) < 2:
        raise ValueError(f"noise estimate needs at least two {baseline!r} runs")
    diffs = []
    for i, j in itertools.combinations(sorted(runs), 2):
        a, b = runs[i], runs[j]
        diffs.extend(abs(a[t] - b[t]) for t in sorted(set(a) & set(b)))
    return diffs


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def build_report(samples, out_dir: str | Path, threshold: float = 0.005,
                 baseline: str = "A", mode: str = "asymptotic",
                 permutations: int = 9999, seed: int = 0) -> dict:
    """Write ECDF and p-value tables (CSV) and figures (SVG) into ``out_dir``.

    Returns a summary dict with per-condition error means, the run-to-run
    noise mean, and the p-value summaries.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    labels = condition_labels(samples)
    if baseline not in labels:
        raise ValueError(f"baseline condition {baseline!r} missing from samples")

    ecdfs = {label: ecdf_eval([s.min_ade for s in samples if s.condition == label])
             for label in labels}
    _write_csv(out / "error_ecdf.csv", ("condition", "error_m", "cdf"),
               ((label, f"{v:.9g}", f"{ecdfs[label](v):.9g}")
                for label in labels for v in ecdfs[label].values))
    _write_csv(out / "error_summary.csv", ("condition", "mean_error_m", "samples"),
               ((label, f"{ecdfs[label].mean:.9g}", ecdfs[label].n) for label in labels))

    noise = noise_differences(samples, baseline)
    noise_ecdf = ecdf_eval(noise)
    _write_csv(out / "noise_ecdf.csv", ("abs_error_delta_m", "cdf"),
               ((f"{v:.9g}", f"{noise_ecdf(v):.9g}") for v in noise_ecdf.values))

    pair_ps = [(f"{baseline}-{baseline}",
                pairwise_pvalues(samples, baseline, baseline, mode=mode,
                                 permutations=permutations, seed=seed))]
    for label in labels:
        if label != baseline:
            pair_ps.append((f"{baseline}-{label}",
                            pairwise_pvalues(samples, baseline, label, mode=mode,
                                             permutations=permutations, seed=seed)))
    _write_csv(out / "pvalues.csv", ("pair", "p"),
               ((pair, f"{p:.9g}") for pair, ps in pair_ps for p in ps))
    summaries = summarize_pvalues((pair, p) for pair, ps in pair_ps for p in ps)
    _write_csv(out / "pvalue_summary.csv", ("pair", "q25", "median", "q75", "mean"),
               ((s.pair_label, f"{s.q25:.9g}", f"{s.median:.9g}", f"{s.q75:.9g}",
                 f"{s.mean:.9g}") for s in summaries))

    _plot_ecdfs(ecdfs, noise_ecdf, out / "error_ecdf.svg")
    _plot_pvalue_boxes(pair_ps, threshold, out / "pvalues.svg")

    return {
        "error_mean": {label: ecdfs[label].mean for label in labels},
        "noise_mean": float(np.mean(noise)),
        "pvalue_summaries": summaries,
        "out_dir": out,
    }


def _plot_ecdfs(ecdfs, noise_ecdf, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, ecdf in sorted(ecdfs.items()):
        xs = ecdf.values
        ax.step(xs, np.arange(1, xs.size + 1) / xs.size, where="post", label=label)
    xs = noise_ecdf.values
    ax.step(xs, np.arange(1, xs.size + 1) / xs.size, where="post",
            label="noise", linestyle="--", color="gray")
    ax.set_xlabel("min ADE over top 10 modes [m]")
    ax.set_ylabel("ECDF")
    ax.set_ylim(0.0, 1.02)
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _plot_pvalue_boxes(pair_ps, threshold: float, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    labels = [pair for pair, _ in pair_ps]
    data = [np.maximum(np.asarray(ps), 1e-12) for _, ps in pair_ps]  # log-scale floor
    ax.boxplot(data, tick_labels=labels, whis=(5, 95))
    ax.axhline(threshold, color="red", linestyle="--", label=f"threshold {threshold:g}")
    ax.set_yscale("log")
    ax.set_ylabel("p-value")
    ax.legend(loc="lower left")
    ax.grid(alpha=0.3, axis="y")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
