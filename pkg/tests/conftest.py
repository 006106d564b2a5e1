import numpy as np
import pytest

from utils.linalg_core import TOLERANCE_ENV_VAR, Tolerance
from utils.matrix_io import load_corpus_pair
from utils.sampler import SamplerSpec, derive_trial_seed, sample_psd


def sample_pair(seed, n, kind="spectrum_controlled", cond=1e2, rank=None):
    """PSD pair drawn the way the search draws one trial"""
    spec = SamplerSpec(kind=kind, n=n, cond=cond, rank=rank)
    A = sample_psd(spec.with_seed(derive_trial_seed(seed, 0)))
    B = sample_psd(spec.with_seed(derive_trial_seed(seed, 1)))
    return A, B


@pytest.fixture(autouse=True)
def default_tolerance(monkeypatch):
    monkeypatch.delenv(TOLERANCE_ENV_VAR, raising=False)


@pytest.fixture
def tol():
    return Tolerance()


@pytest.fixture
def example_pair():
    return load_corpus_pair()


@pytest.fixture
def pd_pair():
    return sample_pair(2024, 4)


@pytest.fixture
def diagonal_pair():
    return np.diag([1.0, 2.0, 3.0]), np.diag([4.0, 0.5, 6.0])
