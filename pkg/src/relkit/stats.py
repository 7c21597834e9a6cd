"""Empirical CDFs, the two-sample Cramér-von Mises test, and p-value summaries.

The test statistic follows the rank form (midranks on ties): with pooled
midranks r_i of x and s_j of y,

    U = n * sum_i (r_i - i)^2 + m * sum_j (s_j - j)^2
    T = U / (n m (n+m)) - (4 n m - 1) / (6 (n+m))

The asymptotic p-value normalizes T to the limiting distribution of the
one-sample statistic and evaluates its tail by series; the permutation
p-value reshuffles the pooled sample with a fixed seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, kv
from scipy.stats import rankdata


@dataclass(frozen=True)
class Ecdf:
    """Right-continuous empirical CDF over a sorted sample."""

    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.size == 0:
            raise ValueError("ECDF needs at least one sample")

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def mean(self) -> float:
        return float(self.values.mean())

    def __call__(self, x):
        return np.searchsorted(self.values, x, side="right") / self.n


def ecdf_eval(samples) -> Ecdf:
    """Build the empirical CDF of a nonempty, finite sample."""
    arr = np.asarray(samples, dtype=float).ravel()
    if arr.size == 0:
        raise ValueError("ECDF needs at least one sample")
    if not np.all(np.isfinite(arr)):
        raise ValueError("samples must be finite")
    return Ecdf(np.sort(arr))


def _statistic_minimum(n: int, m: int) -> float:
    return -(4.0 * n * m - 1.0) / (6.0 * (n + m))


@dataclass(frozen=True)
class CvmResult:
    """Two-sample test outcome; p_permutation stays None in asymptotic-only runs."""

    statistic: float
    n: int
    m: int
    p_asymptotic: float
    p_permutation: float | None = None

    def __post_init__(self) -> None:
        if self.statistic < _statistic_minimum(self.n, self.m) - 1e-9:
            raise ValueError("statistic below its theoretical minimum")
        for p in (self.p_asymptotic, self.p_permutation):
            if p is not None and not 0.0 <= p <= 1.0:
                raise ValueError(f"p-value {p} outside [0, 1]")

    @property
    def pvalue(self) -> float:
        return self.p_permutation if self.p_permutation is not None else self.p_asymptotic


@dataclass(frozen=True)
class PValueSummary:
    """Quartile summary of the p-values collected for one comparison label."""

    pair_label: str
    pvalues: tuple[float, ...]
    q25: float
    median: float
    q75: float
    mean: float


def _checked_arrays(x, y) -> tuple[np.ndarray, np.ndarray]:
    xa = np.asarray(x, dtype=float).ravel()
    ya = np.asarray(y, dtype=float).ravel()
    if xa.size < 2 or ya.size < 2:
        raise ValueError("both samples need at least two values")
    if not (np.all(np.isfinite(xa)) and np.all(np.isfinite(ya))):
        raise ValueError("samples must be finite")
    return xa, ya


def _statistic_from_ranks(rx: np.ndarray, ry: np.ndarray, n: int, m: int) -> float:
    big_n = n + m
    u = n * np.sum((np.sort(rx) - np.arange(1, n + 1)) ** 2)
    u += m * np.sum((np.sort(ry) - np.arange(1, m + 1)) ** 2)
    return float(u / (n * m * big_n) - (4.0 * n * m - 1.0) / (6.0 * big_n))


def cvm_statistic(x, y) -> float:
    """Two-sample statistic T; ties are resolved by midranks."""
    xa, ya = _checked_arrays(x, y)
    n, m = xa.size, ya.size
    ranks = rankdata(np.concatenate([xa, ya]), method="average")
    return _statistic_from_ranks(ranks[:n], ranks[n:], n, m)


def _limiting_cdf(x: float) -> float:
    """CDF of the limiting one-sample distribution (series with K_{1/4} terms);
    truncation error well below 1e-6."""
    if x <= 0.0:
        return 0.0
    total = 0.0
    for k in range(64):
        y = 4.0 * k + 1.0
        q = y * y / (16.0 * x)
        if q > 700.0:
            break
        term = (math.exp(gammaln(k + 0.5) - gammaln(k + 1.0))
                / (math.pi ** 1.5 * math.sqrt(x))
                * math.sqrt(y) * math.exp(-q) * float(kv(0.25, q)))
        total += term
        if term < 1e-10:
            break
    return min(1.0, total)


def _asymptotic_pvalue(statistic: float, n: int, m: int) -> float:
    big_n = n + m
    nm = n * m
    expected = (1.0 + 1.0 / big_n) / 6.0
    variance = (big_n + 1.0) * (4.0 * nm * big_n - 3.0 * (n * n + m * m) - 2.0 * nm)
    variance /= 45.0 * big_n ** 2 * 4.0 * nm
    normalized = 1.0 / 6.0 + (statistic - expected) / math.sqrt(45.0 * variance)
    if normalized < 0.003:  # below the limiting distribution's support for any p < 1
        return 1.0
    return float(min(1.0, max(0.0, 1.0 - _limiting_cdf(normalized))))


def _permutation_pvalue(x: np.ndarray, y: np.ndarray, statistic: float,
                        permutations: int, seed: int) -> float:
    n, m = x.size, y.size
    big_n = n + m
    ranks = rankdata(np.concatenate([x, y]), method="average")
    rng = np.random.default_rng(seed)
    exceed = 0
    block = max(1, min(permutations, int(2e7) // big_n))
    i_n = np.arange(1, n + 1)
    i_m = np.arange(1, m + 1)
    done = 0
    while done < permutations:
        count = min(block, permutations - done)
        perm = rng.permuted(np.tile(ranks, (count, 1)), axis=1)
        rx = np.sort(perm[:, :n], axis=1)
        ry = np.sort(perm[:, n:], axis=1)
        u = n * np.sum((rx - i_n) ** 2, axis=1) + m * np.sum((ry - i_m) ** 2, axis=1)
        t = u / (n * m * big_n) - (4.0 * n * m - 1.0) / (6.0 * big_n)
        exceed += int(np.sum(t >= statistic - 1e-12))
        done += count
    return (1.0 + exceed) / (permutations + 1.0)


def cvm_pvalue(statistic: float, n: int, m: int, mode: str = "asymptotic",
               samples: tuple | None = None, permutations: int = 9999,
               seed: int = 0) -> float:
    """Map a statistic to a p-value.

    ``mode="permutation"`` additionally needs the raw sample pair in
    ``samples`` (the reshuffles act on the pooled data, not on T alone) and at
    least 99 permutations for meaningful resolution.
    """
    if mode == "asymptotic":
        return _asymptotic_pvalue(statistic, n, m)
    if mode == "permutation":
        if permutations < 99:
            raise ValueError("permutation mode needs at least 99 reshuffles")
        if samples is None:
            raise ValueError("permutation mode needs the raw samples")
        x, y = _checked_arrays(*samples)
        if x.size != n or y.size != m:
            raise ValueError("samples disagree with the stated sizes")
        return _permutation_pvalue(x, y, statistic, permutations, seed)
    raise ValueError(f"unknown p-value mode {mode!r}")


def cvm_test(x, y, mode: str = "asymptotic", permutations: int = 9999,
             seed: int = 0) -> CvmResult:
    """Run the two-sample test; asymptotic p is always computed, the
    permutation p only for mode="permutation"."""
    xa, ya = _checked_arrays(x, y)
    statistic = cvm_statistic(xa, ya)
    n, m = xa.size, ya.size
    p_perm = None
    if mode == "permutation":
        p_perm = cvm_pvalue(statistic, n, m, mode="permutation", samples=(xa, ya),
                            permutations=permutations, seed=seed)
    elif mode != "asymptotic":
        raise ValueError(f"unknown p-value mode {mode!r}")
    return CvmResult(statistic=statistic, n=n, m=m,
                     p_asymptotic=_asymptotic_pvalue(statistic, n, m),
                     p_permutation=p_perm)


def summarize_pvalues(pairs) -> list[PValueSummary]:
    """Per-label quartiles/median/mean over (label, p) records, sorted by label."""
    grouped: dict[str, list[float]] = {}
    for label, p in pairs:
        grouped.setdefault(str(label), []).append(float(p))
    out = []
    for label in sorted(grouped):
        values = np.asarray(grouped[label])
        q25, med, q75 = np.percentile(values, [25.0, 50.0, 75.0])
        out.append(PValueSummary(pair_label=label, pvalues=tuple(grouped[label]),
                                 q25=float(q25), median=float(med), q75=float(q75),
                                 mean=float(values.mean())))
    return out
