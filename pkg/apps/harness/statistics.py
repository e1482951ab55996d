"""Confidence intervals and the paired test used to compare decoders."""

from __future__ import annotations

import math

from scipy import stats

from apps.core.exceptions import InvalidArgumentError


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    if trials <= 0:
        raise InvalidArgumentError("Wilson interval needs at least one trial")
    if not 0 <= successes <= trials:
        raise InvalidArgumentError(f"successes {successes} outside [0, {trials}]")
    z = float(stats.norm.ppf(0.5 + confidence / 2.0))
    p = successes / trials
    denom = 1.0 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def rule_of_three(trials: int) -> float:
    """95% upper bound on a rate after ``trials`` events-free trials."""
    if trials <= 0:
        raise InvalidArgumentError("need at least one trial")
    return min(1.0, 3.0 / trials)


def paired_improvement_pvalue(improved: int, worsened: int) -> float:
    """One-sided sign test on discordant pairs: small when ``improved`` dominates.

    ``improved`` counts frames only the baseline got wrong, ``worsened`` frames
    only the candidate got wrong.
    """
    discordant = improved + worsened
    if discordant == 0:
        return 1.0
    return float(stats.binomtest(improved, discordant, 0.5, alternative="greater").pvalue)


def non_increasing_beyond_noise(counts: list[tuple[int, int]], confidence: float = 0.95) -> bool:
    """True unless some later point's interval lies entirely above an earlier point's."""
    intervals = [wilson_interval(k, n, confidence) for k, n in counts]
    for earlier, (lo_e, hi_e) in enumerate(intervals):
        for lo_l, _ in intervals[earlier + 1 :]:
            if lo_l > hi_e:
                return False
    return True
