"""Seeded stochastic simulation of the whole measurement chain.

One trial samples a photon number from the source state, thins it through
the efficiency, adds Poisson background photons, throws every surviving
photon uniformly onto one of the four detectors and records how many
detectors fired.  Estimates of the click probabilities and the click-based
coherences follow from the empirical histogram, with standard errors from
multinomial variance propagation.

Weak fields make multi-click events vanishingly rare, so the simulator
optionally stratifies on the total photon number L reaching the splitter
tree: trials are split between the exactly known strata {L < k} and
{L >= k} (sampled from the deterministic post-detection distribution) and
the estimates recombined with the exact stratum weights.  That keeps
four-click validation feasible in seconds instead of days; only the
routing combinatorics remain stochastic in that mode.

Determinism: trials are processed in fixed-size chunks and every
(stratum, chunk) pair draws from its own counter-based Philox stream keyed
on (seed, stratum, chunk), so results are bit-identical for a given
McConfig regardless of scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .clicks import ClickDistribution, N_DETECTORS, CoherenceTriple, coherence_from_clicks
from .detection import DetectionParams, apply_detection
from .errors import InvalidParameterError, NoSignalError
from .states import PhotonDistribution, StateParams, squeezed_distribution

_CHUNK = 1 << 20
_ROUTING = np.full(N_DETECTORS, 1.0 / N_DETECTORS)


@dataclass(frozen=True)
class McConfig:
    trials: int
    seed: int
    state: StateParams | None = None
    detection: DetectionParams = field(default_factory=DetectionParams)
    source: PhotonDistribution | None = None
    condition_min_photons: int = 0
    tol: float = 1e-12

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidParameterError("trials", "must be >= 1")
        if not (0 <= self.seed < 2**64):
            raise InvalidParameterError("seed", "must be a 64-bit unsigned integer")
        if self.condition_min_photons < 0:
            raise InvalidParameterError("condition_min_photons", "must be >= 0")
        if self.state is None and self.source is None:
            raise InvalidParameterError("state", "either state or source must be given")


@dataclass(frozen=True)
class McResult:
    """Raw click histogram, weighted click-probability estimates with their
    standard errors, and the derived coherences with delta-method errors."""

    click_histogram: np.ndarray
    gamma_hat: np.ndarray
    gamma_se: np.ndarray
    estimated: CoherenceTriple
    estimated_se: tuple[float, float, float]


def _rng(seed: int, stratum: int, chunk: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(stratum, chunk))
    return np.random.Generator(np.random.Philox(ss))


def _route_clicks(rng: np.random.Generator, totals: np.ndarray) -> np.ndarray:
    """Click-count histogram for trials with the given photon totals."""
    counts = rng.multinomial(totals, _ROUTING)
    clicks = (counts > 0).sum(axis=1)
    return np.bincount(clicks, minlength=N_DETECTORS + 1)


def _sample_inverse_cdf(rng: np.random.Generator, cum: np.ndarray, size: int) -> np.ndarray:
    idx = np.searchsorted(cum, rng.random(size), side="right")
    # Mass beyond the truncated support (< the distribution tolerance) is
    # clamped onto the last retained photon number.
    return np.minimum(idx, cum.size - 1)


def _source_distribution(config: McConfig) -> PhotonDistribution:
    if config.source is not None:
        return config.source
    return squeezed_distribution(config.state, config.tol)


def _full_chain_histogram(config: McConfig, source: PhotonDistribution) -> np.ndarray:
    """Sample the generative chain trial by trial (no stratification)."""
    cum = np.cumsum(source.probs)
    eta, gamma = config.detection.eta, config.detection.gamma
    hist = np.zeros(N_DETECTORS + 1, dtype=np.int64)
    done = 0
    chunk_index = 0
    while done < config.trials:
        size = min(_CHUNK, config.trials - done)
        rng = _rng(config.seed, 0, chunk_index)
        n = _sample_inverse_cdf(rng, cum, size)
        kept = rng.binomial(n, eta) if eta < 1.0 else n
        totals = kept + (rng.poisson(gamma, size) if gamma > 0.0 else 0)
        hist += _route_clicks(rng, totals)
        done += size
        chunk_index += 1
    return hist


def _stratified_histograms(
    config: McConfig, transformed: PhotonDistribution
) -> tuple[list[np.ndarray], list[float], list[int]]:
    """Per-stratum click histograms, stratum weights and trial counts."""
    k = config.condition_min_photons
    probs = transformed.probs
    strata: list[tuple[int, np.ndarray]] = []  # (offset, renormalized probs)
    weights: list[float] = []
    head_w = float(probs[:k].sum())
    tail_w = float(probs[k:].sum())
    if head_w > 0.0:
        strata.append((0, probs[:k] / head_w))
        weights.append(head_w)
    if tail_w > 0.0:
        strata.append((k, probs[k:] / tail_w))
        weights.append(tail_w)
    if not strata:
        raise NoSignalError("transformed distribution carries no probability mass")
    # Split trials evenly across the active strata, remainder to the first.
    per = config.trials // len(strata)
    trial_counts = [per] * len(strata)
    trial_counts[0] += config.trials - per * len(strata)
    histograms = []
    for s, ((offset, p), t_s) in enumerate(zip(strata, trial_counts)):
        cum = np.cumsum(p)
        hist = np.zeros(N_DETECTORS + 1, dtype=np.int64)
        done = 0
        chunk_index = 0
        while done < t_s:
            size = min(_CHUNK, t_s - done)
            rng = _rng(config.seed, s + 1, chunk_index)
            totals = offset + _sample_inverse_cdf(rng, cum, size)
            hist += _route_clicks(rng, totals)
            done += size
            chunk_index += 1
        histograms.append(hist)
    return histograms, weights, trial_counts


def _coherence_gradients(gamma_hat: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    i = np.arange(N_DETECTORS + 1, dtype=float)
    n = float(i @ gamma_hat)
    coef2 = np.array([0.0, 0.0, 8.0, 24.0, 48.0])
    s2 = float(coef2 @ gamma_hat)
    grad2 = coef2 / (3.0 * n**2) - (2.0 * s2 / (3.0 * n**3)) * i
    grad3 = np.zeros(5)
    grad3[3] = 16.0 / n**3
    grad3 -= (48.0 * gamma_hat[3] / n**4) * i
    grad4 = np.zeros(5)
    grad4[4] = 256.0 / n**4
    grad4 -= (1024.0 * gamma_hat[4] / n**5) * i
    return grad2, grad3, grad4


def run_mc(config: McConfig) -> McResult:
    """Run the simulation and estimate click probabilities and coherences.

    Raises NoSignalError (with the result attached) when no clicks at all
    were observed, since the coherence normalization is then undefined.
    """
    source = _source_distribution(config)
    if config.condition_min_photons > 0:
        transformed = apply_detection(source, config.detection)
        histograms, weights, trial_counts = _stratified_histograms(config, transformed)
    else:
        histograms = [_full_chain_histogram(config, source)]
        weights = [1.0]
        trial_counts = [config.trials]

    click_histogram = np.sum(histograms, axis=0)
    gamma_hat = np.zeros(N_DETECTORS + 1)
    cov = np.zeros((N_DETECTORS + 1, N_DETECTORS + 1))
    for hist, w, t_s in zip(histograms, weights, trial_counts):
        p_s = hist / t_s
        gamma_hat += w * p_s
        cov += (w * w / t_s) * (np.diag(p_s) - np.outer(p_s, p_s))
    gamma_se = np.sqrt(np.clip(np.diag(cov), 0.0, None))

    clicks = ClickDistribution(probs=np.clip(gamma_hat, 0.0, None))
    if clicks.mean_clicks <= 0.0:
        partial = McResult(
            click_histogram=click_histogram,
            gamma_hat=gamma_hat,
            gamma_se=gamma_se,
            estimated=CoherenceTriple(math.nan, math.nan, math.nan, 0.0),
            estimated_se=(math.nan, math.nan, math.nan),
        )
        raise NoSignalError("no clicks observed in any trial", result=partial)
    estimated = coherence_from_clicks(clicks)
    grads = _coherence_gradients(gamma_hat)
    ses = tuple(float(math.sqrt(max(0.0, g @ cov @ g))) for g in grads)
    return McResult(
        click_histogram=click_histogram,
        gamma_hat=gamma_hat,
        gamma_se=gamma_se,
        estimated=estimated,
        estimated_se=ses,
    )
