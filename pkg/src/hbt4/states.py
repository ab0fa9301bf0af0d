"""Photon-number distributions of displaced squeezed and coherent states.

The squeezed-state distribution oscillates with photon number and involves
Hermite polynomials of a complex argument.  Evaluating it naively overflows
for moderate photon numbers, so everything here runs through a scaled
three-term recurrence whose iterates stay O(1) wherever the probabilities
themselves are O(1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import InternalInvariantError, InvalidParameterError, TruncationError

# Below this squeezing the Hermite argument becomes numerically degenerate
# (it grows like 1/sqrt(r)) and the state is a coherent state to double
# precision, so we dispatch to the Poisson branch.
R_MIN_SQUEEZED = 1e-8

# Hard cap on the truncated photon-number support.
N_HARD_MAX = 4096

# Extra support kept beyond the point where the probability mass criterion
# is met.  High-order factorial moments weight p_n by n(n-1)(n-2)(n-3), so
# terms far below any total-mass tolerance can still matter; the margin
# keeps those terms available to downstream consumers.
_SUPPORT_MARGIN = 16

_DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class StateParams:
    """Squeezing magnitude ``r``, squeezing phase ``theta`` (radians) and
    real displacement amplitude ``alpha``."""

    r: float
    theta: float
    alpha: float

    def __post_init__(self):
        if not math.isfinite(self.r) or self.r < 0.0:
            raise InvalidParameterError("r", f"must be finite and >= 0, got {self.r}")
        if not math.isfinite(self.theta):
            raise InvalidParameterError("theta", f"must be finite, got {self.theta}")
        if not math.isfinite(self.alpha):
            raise InvalidParameterError("alpha", f"must be finite and real, got {self.alpha}")


@dataclass(frozen=True)
class PhotonDistribution:
    """Truncated photon-number distribution plus the probability mass that
    fell beyond the truncation point."""

    probs: np.ndarray
    tail_mass: float

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        if probs.ndim != 1 or probs.size == 0:
            raise InvalidParameterError("probs", "must be a non-empty 1-d array")
        if np.any(probs < 0.0) or not np.all(np.isfinite(probs)):
            raise InvalidParameterError("probs", "entries must be finite and >= 0")
        if not (0.0 <= self.tail_mass <= 1.0):
            raise InvalidParameterError("tail_mass", f"must lie in [0, 1], got {self.tail_mass}")
        total = probs.sum() + self.tail_mass
        if abs(total - 1.0) > 1e-9:
            raise InternalInvariantError(
                f"probabilities + tail must sum to 1, got {total!r}"
            )

    def __len__(self) -> int:
        return self.probs.size

    @property
    def mean(self) -> float:
        """First moment of the truncated distribution."""
        return float(np.arange(self.probs.size) @ self.probs)


def fock_distribution(n: int) -> PhotonDistribution:
    """Deterministic ``n``-photon source (useful as a diagnostic input)."""
    if n < 0:
        raise InvalidParameterError("n", "photon number must be >= 0")
    probs = np.zeros(n + 1)
    probs[n] = 1.0
    return PhotonDistribution(probs=probs, tail_mass=0.0)


def hermite_scaled(n_max: int, x: complex, t: float) -> np.ndarray:
    """Scaled Hermite values u_n = H_n(x) * t^(n/2) / sqrt(n!) for n = 0..n_max.

    H_n is the physicists' Hermite polynomial.  The recurrence

        u_{n+1} = sqrt(4t/(n+1)) * x * u_n - 2t * sqrt(n/(n+1)) * u_{n-1}

    folds the t^(n/2)/sqrt(n!) scaling into every step, so no factorial or
    bare polynomial value is ever formed.
    """
    if n_max < 0:
        raise InvalidParameterError("n_max", "must be >= 0")
    x = complex(x)
    if not (math.isfinite(x.real) and math.isfinite(x.imag)):
        raise InvalidParameterError("x", "must be finite")
    if not (0.0 <= t <= 0.5):
        raise InvalidParameterError("t", f"must lie in [0, 0.5], got {t}")
    u = np.zeros(n_max + 1, dtype=complex)
    u[0] = 1.0
    if n_max >= 1:
        u[1] = 2.0 * math.sqrt(t) * x
    for n in range(1, n_max):
        u[n + 1] = (
            math.sqrt(4.0 * t / (n + 1)) * x * u[n]
            - 2.0 * t * math.sqrt(n / (n + 1)) * u[n - 1]
        )
    return u


def _truncate(probs: np.ndarray, tol: float, at_hard_max: bool) -> np.ndarray | None:
    """Shortest prefix whose complementary mass is below tol, extended by a
    safety margin.  None when the criterion is not met within the array, or
    when the margin does not fit yet (so the caller grows the support);
    at the hard size cap a clipped margin is accepted."""
    cum = np.cumsum(probs)
    below = np.nonzero(1.0 - cum < tol)[0]
    if below.size == 0:
        return None
    n_mass = int(below[0])
    n_keep = max(2 * (n_mass + 1), n_mass + 1 + _SUPPORT_MARGIN)
    if n_keep > probs.size:
        if not at_hard_max:
            return None
        n_keep = probs.size
    return probs[:n_keep]


def _validate_tol(tol: float) -> None:
    if not (0.0 < tol <= 1e-6):
        raise InvalidParameterError("tol", f"must lie in (0, 1e-6], got {tol}")


def coherent_distribution(alpha: float, tol: float = _DEFAULT_TOL) -> PhotonDistribution:
    """Poisson photon-number distribution of a coherent state of amplitude
    ``alpha`` (mean alpha**2), truncated so the tail is below ``tol``."""
    _validate_tol(tol)
    if not math.isfinite(alpha):
        raise InvalidParameterError("alpha", "must be finite")
    mu = alpha * alpha
    if mu == 0.0:
        return PhotonDistribution(probs=np.array([1.0]), tail_mass=0.0)
    n_max = 64
    while True:
        n = np.arange(n_max + 1)
        probs = np.exp(n * math.log(mu) - mu - gammaln(n + 1))
        kept = _truncate(probs, tol, at_hard_max=n_max >= N_HARD_MAX)
        if kept is not None:
            tail = max(0.0, 1.0 - float(kept.sum()))
            return PhotonDistribution(probs=kept, tail_mass=tail)
        if n_max >= N_HARD_MAX:
            raise TruncationError(
                f"coherent state with mean {mu:g} does not reach tail < {tol:g} "
                f"within {N_HARD_MAX} photon numbers"
            )
        n_max = min(2 * n_max, N_HARD_MAX)


def squeezed_distribution(params: StateParams, tol: float = _DEFAULT_TOL) -> PhotonDistribution:
    """Photon-number distribution of the displaced squeezed state.

    p_n is proportional to tanh^n(r) / (2^n n!) |H_n(x)|^2 with the complex
    Hermite argument x = alpha e^{-i theta/2} / sqrt(2 cosh r sinh r).  The
    prefactor exp(-alpha^2 + alpha^2 cos(theta) tanh r)/cosh r uses the real
    form of the exponent, valid because alpha is real.  Truncation grows
    adaptively until the tail mass drops below ``tol``.
    """
    _validate_tol(tol)
    if params.r < R_MIN_SQUEEZED:
        return coherent_distribution(params.alpha, tol)
    r, theta, alpha = params.r, params.theta, params.alpha
    x = alpha * np.exp(-0.5j * theta) / math.sqrt(2.0 * math.cosh(r) * math.sinh(r))
    t = math.tanh(r) / 2.0
    log_pref = -alpha * alpha + alpha * alpha * math.cos(theta) * math.tanh(r) - math.log(math.cosh(r))
    pref = math.exp(log_pref)
    n_max = 64
    while True:
        u = hermite_scaled(n_max, x, t)
        probs = pref * np.abs(u) ** 2
        kept = _truncate(probs, tol, at_hard_max=n_max >= N_HARD_MAX)
        if kept is not None:
            tail = max(0.0, 1.0 - float(kept.sum()))
            return PhotonDistribution(probs=kept, tail_mass=tail)
        if n_max >= N_HARD_MAX:
            raise TruncationError(
                f"squeezed state (r={r:g}, theta={theta:g}, alpha={alpha:g}) does not "
                f"reach tail < {tol:g} within {N_HARD_MAX} photon numbers"
            )
        n_max = min(2 * n_max, N_HARD_MAX)
