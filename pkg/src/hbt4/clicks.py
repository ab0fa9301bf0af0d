"""Joint click statistics of four on/off detectors behind a balanced
splitter tree.

Three 50/50 beam splitters route every photon to one of four detectors
with equal probability 1/4, so the number of detectors that fire is the
number of occupied cells when L photons are thrown uniformly into 4 boxes.
``click_probabilities`` evaluates the closed-form occupancy expression
(inclusion-exclusion, O(L) per photon number); the literal multinomial
routing sums are kept in ``multinomial_click_probabilities`` as the O(L^3)
reference path the closed form is validated against.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, NoSignalError
from .states import PhotonDistribution

N_DETECTORS = 4


@dataclass(frozen=True)
class ClickDistribution:
    """Probabilities that exactly 0..4 detectors fire in one window.

    ``defect`` is the probability mass of the truncated photon-number tail
    that could not be assigned to any click count; it is reported rather
    than silently folded into the zero-click bucket.
    """

    probs: np.ndarray
    defect: float = 0.0

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        if probs.shape != (N_DETECTORS + 1,):
            raise InvalidParameterError("probs", "must have exactly 5 entries")
        if np.any(probs < 0.0) or not np.all(np.isfinite(probs)):
            raise InvalidParameterError("probs", "entries must be finite and >= 0")

    @property
    def mean_clicks(self) -> float:
        return float(np.arange(N_DETECTORS + 1) @ self.probs)


@dataclass(frozen=True)
class CoherenceTriple:
    """Second-, third- and fourth-order coherence plus the mean (click or
    photon) number they were normalized with."""

    g2: float
    g3: float
    g4: float
    mean_clicks: float


def _occupancy_factor(j: int, length: int) -> np.ndarray:
    """P(exactly j of 4 equally likely cells occupied | L balls) for
    L = 0..length-1, via inclusion-exclusion over the empty cells."""
    L = np.arange(length)
    total = np.zeros(length)
    for i in range(j + 1):
        base = (j - i) / N_DETECTORS
        if base == 0.0:
            powers = np.where(L == 0, 1.0, 0.0)
        else:
            powers = base ** L.astype(float)
        total += (-1) ** i * math.comb(j, i) * powers
    return math.comb(N_DETECTORS, j) * total


def click_probabilities(dist: PhotonDistribution) -> ClickDistribution:
    """All five click probabilities of the transformed photon-number
    distribution, computed by the occupancy closed form."""
    lam = dist.probs
    probs = np.empty(N_DETECTORS + 1)
    for j in range(N_DETECTORS + 1):
        probs[j] = max(0.0, float(lam @ _occupancy_factor(j, lam.size)))
    return ClickDistribution(probs=probs, defect=dist.tail_mass)


@functools.lru_cache(maxsize=None)
def _multinomial_inner_sums(L: int) -> tuple[int, int, int]:
    """Exact integer values of the nested splitter sums for L photons:
    the two-, three- and four-detector multinomial counts."""
    s2 = sum(math.comb(L, k1) for k1 in range(1, L)) if L >= 2 else 0
    s3 = (
        sum(
            math.comb(L, k1) * math.comb(k1, k3)
            for k1 in range(2, L)
            for k3 in range(1, k1)
        )
        if L >= 3
        else 0
    )
    s4 = (
        sum(
            math.comb(L, k1) * math.comb(k1, k3) * math.comb(L - k1, k5)
            for k1 in range(2, L - 1)
            for k3 in range(1, k1)
            for k5 in range(1, L - k1)
        )
        if L >= 4
        else 0
    )
    return s2, s3, s4


def multinomial_click_probabilities(dist: PhotonDistribution) -> ClickDistribution:
    """Reference evaluation by the literal nested multinomial routing sums.

    Inner sums run over the photon splits at each beam splitter and are
    accumulated in exact integer arithmetic (cached per photon number)
    before the single 4^-L scaling.  Cost grows cubically with the support;
    intended for validation, not for the production pipeline.
    """
    lam = dist.probs
    probs = np.zeros(N_DETECTORS + 1)
    if lam.size > 0:
        probs[0] = lam[0]
    for L in range(1, lam.size):
        w = lam[L] * 0.25**L
        if w == 0.0:
            continue
        s2, s3, s4 = _multinomial_inner_sums(L)
        probs[1] += 4.0 * w
        probs[2] += 6.0 * w * float(s2)
        probs[3] += 4.0 * w * float(s3)
        probs[4] += w * float(s4)
    return ClickDistribution(probs=probs, defect=dist.tail_mass)


def coherence_from_clicks(clicks: ClickDistribution) -> CoherenceTriple:
    """Click-based coherence estimators.

    With G_i the probability of exactly i clicks and <n> = sum i*G_i:

        g2 = (8 G_2 + 24 G_3 + 48 G_4) / (3 <n>^2)
        g3 = 16 G_3 / <n>^3
        g4 = 256 G_4 / <n>^4

    The coefficients average over the detector groupings so each estimator
    is unbiased for the corresponding factorial moment in the weak-field
    limit.
    """
    g = clicks.probs
    n = clicks.mean_clicks
    if n <= 0.0:
        raise NoSignalError("mean click number is zero; coherence undefined")
    g2 = (8.0 * g[2] + 24.0 * g[3] + 48.0 * g[4]) / (3.0 * n * n)
    g3 = 16.0 * g[3] / n**3
    g4 = 256.0 * g[4] / n**4
    return CoherenceTriple(g2=g2, g3=g3, g4=g4, mean_clicks=n)


def click_coherence(dist: PhotonDistribution) -> CoherenceTriple:
    """Coherence of a fully transformed distribution via the click model."""
    return coherence_from_clicks(click_probabilities(dist))
