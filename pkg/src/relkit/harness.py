"""Input conditions, repeated prediction campaigns, and filter validity verdicts.

The campaign runs the predictor several times per condition over the corpus,
collects per-scene errors, compares per-run error distributions pairwise with
the two-sample test, and declares a filter falsified when the median p-value
of its comparisons against the unfiltered input drops below the threshold.
"""

from __future__ import annotations

import hashlib
import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import Category, EgoCapabilities, Scene, WorldAssumptions, region_filter
from .criteria import RelevanceVerdict, relevant_objects
from .predictor import Trajectory, min_ade_topk, predict_modes
from .stats import cvm_test

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Condition:
    """One way of preparing the predictor's input from a region-filtered scene."""

    label: str
    kind: str  # identity | remove_all | ego_corridor | relevance
    corridor_half_width: float = 2.0
    forward_only: bool = True


CONDITION_A = Condition("A", "identity")
CONDITION_R = Condition("R", "relevance")
CONDITION_RV = Condition("RV", "remove_all")
CONDITION_RV2 = Condition("RV2", "ego_corridor")
DEFAULT_CONDITIONS = (CONDITION_A, CONDITION_R, CONDITION_RV, CONDITION_RV2)
_BY_LABEL = {c.label: c for c in DEFAULT_CONDITIONS}


def condition_by_label(label: str) -> Condition:
    try:
        return _BY_LABEL[label]
    except KeyError:
        raise ValueError(f"unknown condition label {label!r}; known: {sorted(_BY_LABEL)}")


@dataclass(frozen=True)
class ErrorSample:
    """One (condition, run, scene) prediction-error record."""

    condition: str
    run_index: int
    scene_token: str
    min_ade: float  # m

    def __post_init__(self) -> None:
        if self.min_ade < 0.0:
            raise ValueError("min_ade must be >= 0")
        if self.run_index < 0:
            raise ValueError("run_index must be >= 0")


@dataclass(frozen=True)
class Verdict:
    """Validity verdict for one filter label against the baseline."""

    filter_label: str
    median_p: float
    mean_p: float
    threshold: float
    noise_band: tuple[float, float]  # baseline-baseline p-value (q25, q75)
    within_noise_band: bool
    outcome: str  # "falsified" | "not_falsified"

    def __post_init__(self) -> None:
        expected = "falsified" if self.median_p < self.threshold else "not_falsified"
        if self.outcome != expected:
            raise ValueError("outcome inconsistent with median_p vs threshold")


def apply_condition(scene: Scene, condition: Condition,
                    verdicts: list[RelevanceVerdict] | None = None) -> Scene:
    """Filter a region-filtered scene's objects per the condition.

    The target agent is always retained (its history feeds the predictor).
    """
    if condition.kind == "identity":
        return scene
    target = scene.target()
    if condition.kind == "remove_all":
        return scene.with_objects((target,))
    if condition.kind == "ego_corridor":
        h = scene.ego.heading_unit()
        kept = []
        for obj in scene.objects:
            if obj.id != target.id and obj.category is Category.VEHICLE:
                rel = obj.position - scene.ego.position
                ahead = rel.dot(h) >= 0.0 or not condition.forward_only
                if ahead and abs(h.cross(rel)) <= condition.corridor_half_width:
                    continue
            kept.append(obj)
        return scene.with_objects(tuple(kept))
    if condition.kind == "relevance":
        if verdicts is None:
            raise ValueError("relevance condition needs precomputed verdicts")
        keep_ids = {v.object_id for v in verdicts if v.relevant}
        keep_ids.add(target.id)
        return scene.with_objects(tuple(o for o in scene.objects if o.id in keep_ids))
    raise ValueError(f"unknown condition kind {condition.kind!r}")


def run_seed(campaign_seed: int, run_index: int, scene_token: str) -> int:
    """Stable per-(run, scene) seed: reproducible campaigns, per-run noise."""
    digest = hashlib.sha256(f"{campaign_seed}:{run_index}:{scene_token}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _campaign_chunk(scenes, conditions, runs, campaign_seed, caps, world,
                    enable_rtt_prime, predictor) -> list[ErrorSample]:
    samples = []
    needs_verdicts = any(c.kind == "relevance" for c in conditions)
    for scene in scenes:
        base = region_filter(scene)
        verdicts = (relevant_objects(base, caps, world, enable_rtt_prime=enable_rtt_prime)
                    if needs_verdicts else None)
        truth = Trajectory(scene.ground_truth_future)
        for condition in conditions:
            filtered = apply_condition(base, condition, verdicts)
            for run in range(runs):
                seed = run_seed(campaign_seed, run, scene.token)
                try:
                    prediction = predictor(filtered, seed)
                    error = min_ade_topk(prediction, truth)
                except Exception:
                    logger.warning("prediction failed: condition=%s run=%d scene=%s; "
                                   "sample excluded", condition.label, run, scene.token,
                                   exc_info=True)
                    continue
                samples.append(ErrorSample(condition.label, run, scene.token, error))
    return samples


def run_campaign(scenes, predictor=predict_modes, conditions=DEFAULT_CONDITIONS,
                 runs: int = 10, campaign_seed: int = 0,
                 caps: EgoCapabilities | None = None,
                 world: WorldAssumptions | None = None,
                 enable_rtt_prime: bool = False, jobs: int = 1) -> list[ErrorSample]:
    """Full (condition x run x scene) error sweep, deterministic in campaign_seed.

    Failed predictions are logged and omitted; the pairwise comparisons later
    drop such scenes from both sides. Output is canonically sorted, so the
    sample list is identical regardless of ``jobs``.
    """
    scenes = list(scenes)
    if not scenes:
        raise ValueError("campaign needs a nonempty dataset")
    if caps is None or world is None:
        from .config import DEFAULT_CAPABILITIES, DEFAULT_WORLD
        caps = caps or DEFAULT_CAPABILITIES
        world = world or DEFAULT_WORLD
    args = (tuple(conditions), runs, campaign_seed, caps, world, enable_rtt_prime, predictor)
    if jobs > 1 and len(scenes) > 1:
        chunks = [scenes[i::jobs] for i in range(jobs) if scenes[i::jobs]]
        with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
            parts = pool.map(_campaign_chunk, chunks, *[[a] * len(chunks) for a in args])
            samples = [s for part in parts for s in part]
    else:
        samples = _campaign_chunk(scenes, *args)
    samples.sort(key=lambda s: (s.condition, s.run_index, s.scene_token))
    return samples


def _per_run_errors(samples, label: str) -> dict[int, dict[str, float]]:
    runs: dict[int, dict[str, float]] = {}
    for s in samples:
        if s.condition == label:
            runs.setdefault(s.run_index, {})[s.scene_token] = s.min_ade
    return runs


def pairwise_pvalues(samples, label_x: str, label_y: str, mode: str = "asymptotic",
                     permutations: int = 9999, seed: int = 0) -> list[float]:
    """p-values over run pairs: all unordered pairs within a label (x == y),
    otherwise all ordered (x-run, y-run) combinations.

    Each comparison pools the per-scene errors of the two runs, restricted to
    the scene tokens present in both.
    """
    runs_x = _per_run_errors(samples, label_x)
    runs_y = _per_run_errors(samples, label_y)
    if len(runs_x) < 2 or len(runs_y) < 2:
        raise ValueError("pairwise comparison needs at least two runs per label")
    if label_x == label_y:
        pairs = list(itertools.combinations(sorted(runs_x), 2))
    else:
        pairs = list(itertools.product(sorted(runs_x), sorted(runs_y)))
    pvalues = []
    for i, j in pairs:
        a, b = runs_x[i], runs_y[j]
        common = sorted(set(a) & set(b))
        if len(common) < 2:
            raise ValueError(f"runs {label_x}#{i} and {label_y}#{j} share fewer than "
                             "two scenes")
        result = cvm_test([a[t] for t in common], [b[t] for t in common],
                          mode=mode, permutations=permutations, seed=seed)
        pvalues.append(result.pvalue)
    return pvalues


def validate_filter(samples, filter_label: str, threshold: float = 0.005,
                    baseline: str = "A", mode: str = "asymptotic",
                    permutations: int = 9999, seed: int = 0) -> Verdict:
    """Falsified iff the median baseline-vs-filter p-value sinks below the
    threshold; the baseline noise band is reported for context."""
    base_ps = np.asarray(pairwise_pvalues(samples, baseline, baseline, mode=mode,
                                          permutations=permutations, seed=seed))
    filt_ps = np.asarray(pairwise_pvalues(samples, baseline, filter_label, mode=mode,
                                          permutations=permutations, seed=seed))
    median = float(np.median(filt_ps))
    q25, q75 = (float(v) for v in np.percentile(base_ps, [25.0, 75.0]))
    return Verdict(
        filter_label=filter_label,
        median_p=median,
        mean_p=float(filt_ps.mean()),
        threshold=threshold,
        noise_band=(q25, q75),
        within_noise_band=q25 <= median <= q75,
        outcome="falsified" if median < threshold else "not_falsified",
    )
