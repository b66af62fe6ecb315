import numpy as np
import pytest

from svq import ChainModel, Dataset, StageModel


def make_stage(rng, dim, M, n, scale=1.0):
    return StageModel(
        dim_in=dim, M=M, n=n,
        weights=rng.normal(scale=scale, size=(M, dim)),
        biases=rng.normal(scale=scale, size=M),
        recon=rng.normal(scale=scale, size=(M, dim)),
    )


def make_chain(rng, dims_M_n, stage_weights=None):
    """dims_M_n: list of (dim_in, M, n); dim links must already be valid."""
    stages = [make_stage(rng, d, M, n) for d, M, n in dims_M_n]
    return ChainModel(stages=stages, stage_weights=stage_weights)


def make_dataset(rng, count, dim, scale=1.0):
    return Dataset(vectors=rng.normal(scale=scale, size=(count, dim)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
