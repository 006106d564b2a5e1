"""
Seeded generators for PSD matrices with controllable dimension, rank and
conditioning, plus the per-trial seed mixing function.

The generator is numpy's PCG64 bit generator, so a (spec, seed) pair fully
determines the sampled matrix.
"""

import logging
from dataclasses import asdict, dataclass, replace
from enum import Enum
from typing import Optional

import numpy as np

from utils.errors import DomainError

logger = logging.getLogger(__name__)

UINT64_MASK = (1 << 64) - 1
SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
DEFAULT_COND = 1e3


class SamplerKind(str, Enum):
    """Matrix ensembles the sampler can draw from"""

    WISHART = "wishart"
    SPECTRUM_CONTROLLED = "spectrum_controlled"
    RANK_DEFICIENT = "rank_deficient"


@dataclass(frozen=True)
class SamplerSpec:
    """
    Recipe for one random PSD matrix

    Args:
        kind: wishart | spectrum_controlled | rank_deficient
        n: Dimension
        seed: 64-bit unsigned seed
        cond: Target condition number (spectrum_controlled)
        rank: Target rank (rank_deficient), defaults to n
    """

    kind: str
    n: int
    seed: int = 0
    cond: float = DEFAULT_COND
    rank: Optional[int] = None

    def __post_init__(self):
        try:
            SamplerKind(self.kind)
        except ValueError:
            raise DomainError(
                f"Unknown sampler kind {self.kind!r} (available: {[k.value for k in SamplerKind]})"
            )
        if int(self.n) < 1:
            raise DomainError(f"Sampler dimension must be >= 1, got {self.n}")
        if not (np.isfinite(self.cond) and self.cond >= 1.0):
            raise DomainError(f"Sampler cond must be >= 1, got {self.cond}")
        if self.rank is not None and not (1 <= int(self.rank) <= int(self.n)):
            raise DomainError(f"Sampler rank must lie in [1, {self.n}], got {self.rank}")
        if not (0 <= int(self.seed) <= UINT64_MASK):
            raise DomainError(f"Sampler seed must be a 64-bit unsigned integer, got {self.seed}")

    def with_seed(self, seed):
        return replace(self, seed=int(seed))

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        rank = data.get("rank")
        return cls(
            kind=str(data["kind"]),
            n=int(data["n"]),
            seed=int(data.get("seed", 0)),
            cond=float(data.get("cond", DEFAULT_COND)),
            rank=None if rank is None else int(rank),
        )


def derive_trial_seed(master_seed, trial_index):
    """
    SplitMix64 output for state master_seed + gamma·(trial_index + 1)

    With master_seed = s this reproduces the SplitMix64 stream seeded with s,
    so (0, 0) gives 0xE220A8397B1DCDAF.
    """
    z = (int(master_seed) + SPLITMIX_GAMMA * (int(trial_index) + 1)) & UINT64_MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & UINT64_MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & UINT64_MASK
    return z ^ (z >> 31)


def _generator(seed):
    return np.random.Generator(np.random.PCG64(int(seed)))


def _orthogonal(rng, n):
    """Haar-style orthogonal matrix from QR with the R diagonal made positive"""
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return Q * signs


def _log_uniform_spectrum(rng, n, cond):
    """Spectrum in [1, cond] with both endpoints attained"""
    if n == 1:
        return np.ones(1)
    interior = rng.uniform(0.0, 1.0, size=n - 2)
    exponents = np.concatenate(([1.0, 0.0], interior))
    return np.exp(exponents * np.log(cond))


def sample_psd(spec):
    """
    Draw the PSD matrix described by `spec`

    Returns:
        Symmetric PSD ndarray of shape (n, n)
    """
    rng = _generator(spec.seed)
    n = int(spec.n)
    kind = SamplerKind(spec.kind)

    if kind is SamplerKind.WISHART:
        G = rng.standard_normal((n, n))
        M = G @ G.T
    elif kind is SamplerKind.SPECTRUM_CONTROLLED:
        Q = _orthogonal(rng, n)
        M = (Q * _log_uniform_spectrum(rng, n, float(spec.cond))) @ Q.T
    else:
        rank = n if spec.rank is None else int(spec.rank)
        G = rng.standard_normal((n, rank))
        M = G @ G.T

    return 0.5 * (M + M.T)
