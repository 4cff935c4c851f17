import pytest
from hypothesis import settings

from grn_logistic import ModelConfig, CoreParams, get_preset, solve_equilibrium

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


@pytest.fixture(scope="session")
def base_cfg() -> ModelConfig:
    return ModelConfig.from_core(CoreParams())


@pytest.fixture(scope="session")
def comparison_cfg() -> ModelConfig:
    return get_preset("fig2-illustrative")


@pytest.fixture(scope="session")
def lin_eq(base_cfg):
    return solve_equilibrium("linear-additive", base_cfg.linear)


@pytest.fixture(scope="session")
def wt_eq(base_cfg):
    return solve_equilibrium("weighted", base_cfg.weighted)
