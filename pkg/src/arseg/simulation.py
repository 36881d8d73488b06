"""Series generators for the benchmark design.

Randomness comes from ``numpy``'s counter-based Philox bit generator keyed
by a :class:`numpy.random.SeedSequence`, and every variate is produced by
inverse-CDF transforms of its uniforms, so a seed pins the output bit for
bit on any platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import signal

from .core import Series, validate_series
from .errors import InvalidConfig, TooShort
from .robust_rho import standard_normal

PAPER_TAUS = tuple(
    Fraction(num, 36) for num in (6 - 1, 6 + 1, 18 - 2, 18 + 2, 30 - 3, 30 + 3)
)
PAPER_MEANS = (0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0)


def make_rng(seed) -> np.random.Generator:
    """Philox generator keyed by an int or a tuple of ints."""
    entropy = list(seed) if isinstance(seed, (tuple, list)) else [int(seed)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def paper_design(n: int) -> tuple[tuple[Fraction, ...], tuple[float, ...]]:
    """Six change-points at ``1/6 +- 1/36, 3/6 +- 2/36, 5/6 +- 3/36`` with 0/1 means."""
    if n < 72:
        raise TooShort(f"the benchmark design needs n >= 72, got {n}")
    return PAPER_TAUS, PAPER_MEANS


def taus_to_changepoints(n: int, taus: Sequence) -> tuple[int, ...]:
    """``floor(n * tau)``, exact for rational fractions."""
    return tuple(math.floor(n * Fraction(t)) for t in taus)


@dataclass(frozen=True)
class Noise:
    """Noise process: ``ar1``, ``ar2`` (with ``phi1, phi2``) or ``cauchy``."""

    kind: str = "ar1"
    phi1: float = 0.0
    phi2: float = 0.0

    def __post_init__(self):
        if self.kind not in ("ar1", "ar2", "cauchy"):
            raise InvalidConfig(f"unknown noise kind {self.kind!r}")
        if self.kind == "ar2":
            p1, p2 = self.phi1, self.phi2
            if not (abs(p2) < 1 and p1 + p2 < 1 and p2 - p1 < 1):
                raise InvalidConfig(f"AR(2) coefficients ({p1}, {p2}) are not stationary")

    @classmethod
    def parse(cls, text: str) -> "Noise":
        """Parse ``ar1``, ``cauchy`` or ``ar2:<phi1>,<phi2>``."""
        text = text.strip().lower()
        if text.startswith("ar2"):
            _, _, params = text.partition(":")
            try:
                p1, p2 = (float(v) for v in params.split(","))
            except ValueError:
                raise InvalidConfig(f"bad AR(2) spec {text!r}") from None
            return cls("ar2", p1, p2)
        return cls(text)

    def label(self) -> str:
        return f"ar2:{self.phi1!r},{self.phi2!r}" if self.kind == "ar2" else self.kind


@dataclass(frozen=True)
class SimulationConfig:
    n: int
    rho_star: float = 0.0
    sigma_star: float = 1.0
    means: tuple[float, ...] = (0.0,)
    true_taus: tuple = ()
    noise: Noise = field(default_factory=Noise)
    seed: object = 0

    def __post_init__(self):
        if self.n < 2:
            raise InvalidConfig("n must be at least 2")
        if self.noise.kind != "ar2" and not abs(self.rho_star) < 1:
            raise InvalidConfig(f"|rho_star| must be < 1, got {self.rho_star}")
        if self.sigma_star < 0:
            raise InvalidConfig("sigma_star must be nonnegative")
        if len(self.means) != len(self.true_taus) + 1:
            raise InvalidConfig("need exactly one more mean than change-point fractions")
        cps = self.changepoints
        if any(not 0 < t < self.n for t in cps) or list(cps) != sorted(set(cps)):
            raise InvalidConfig(f"change-points {cps} are not strictly inside (0, {self.n})")

    @classmethod
    def paper(cls, n, rho_star, sigma_star, noise=None, seed=0) -> "SimulationConfig":
        taus, means = paper_design(n)
        return cls(n, rho_star, sigma_star, means, taus, noise or Noise(), seed)

    @property
    def changepoints(self) -> tuple[int, ...]:
        return taus_to_changepoints(self.n, self.true_taus)

    def mean_path(self) -> np.ndarray:
        """Piecewise-constant mean for ``y_0..y_n``; ``y_0`` takes the first level."""
        bounds = (0, *self.changepoints, self.n)
        mu = np.empty(self.n + 1)
        mu[0] = self.means[0]
        for k, (u, v) in enumerate(zip(bounds[:-1], bounds[1:])):
            mu[u + 1 : v + 1] = self.means[k]
        return mu


def _ar1(rng, n, rho, sigma) -> np.ndarray:
    eta0 = standard_normal(rng, 1)[0] * sigma / math.sqrt(1.0 - rho * rho)
    eps = standard_normal(rng, n) * sigma
    rest = signal.lfilter([1.0], [1.0, -rho], eps, zi=[rho * eta0])[0]
    return np.concatenate(([eta0], rest))


def _ar2(rng, n, phi1, phi2, sigma) -> np.ndarray:
    # burn-in from the zero state; the transient decays geometrically
    burn = 10 * n
    eps = standard_normal(rng, burn + n + 1) * sigma
    eta = signal.lfilter([1.0], [1.0, -phi1, -phi2], eps)
    return eta[burn:]


def _cauchy(rng, size) -> np.ndarray:
    return np.tan(np.pi * (rng.random(size) - 0.5))


def _cauchy_ar1(rng, n, rho, scale) -> np.ndarray:
    # the stationary law of sum rho^k eps_{i-k} is Cauchy(0, scale / (1 - |rho|))
    eta0 = _cauchy(rng, 1)[0] * scale / (1.0 - abs(rho))
    eps = _cauchy(rng, n) * scale
    rest = signal.lfilter([1.0], [1.0, -rho], eps, zi=[rho * eta0])[0]
    return np.concatenate(([eta0], rest))


def simulate_noise(cfg: SimulationConfig, rng: np.random.Generator) -> np.ndarray:
    kind = cfg.noise.kind
    if kind == "ar1":
        return _ar1(rng, cfg.n, cfg.rho_star, cfg.sigma_star)
    if kind == "ar2":
        return _ar2(rng, cfg.n, cfg.noise.phi1, cfg.noise.phi2, cfg.sigma_star)
    return _cauchy_ar1(rng, cfg.n, cfg.rho_star, cfg.sigma_star)


def simulate(cfg: SimulationConfig) -> Series:
    """Draw ``y_0..y_n`` = piecewise mean (or location) + noise."""
    rng = make_rng(cfg.seed)
    return validate_series(cfg.mean_path() + simulate_noise(cfg, rng))
