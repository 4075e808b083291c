import pytest

from config import *


def test_defaults( ):
    config = SearchConfig()
    assert(config.stop_rule == "certified" and config.budget == 1_000_000)
    assert(config.rank_rtol == 1e-10 and config.feasibility_tol == 1e-10)
    assert(config.seed_gap_tol == 1e-4 and config.seed_iterations == 50000)

def test_from_env( ):
    assert(SearchConfig.from_env({}) == SearchConfig())
    assert(SearchConfig.from_env({"APPROX_BUDGET": "250"}).budget == 250)
    assert(SearchConfig.from_env({"APPROX_BUDGET": " "}).budget == 1_000_000), "blank value means unset"

    config = SearchConfig.from_env({"APPROX_BUDGET": "250"}, budget=40, workers=None, stop_rule="exhaustive")
    assert(config.budget == 40 and config.workers == 1 and config.stop_rule == "exhaustive")

    with pytest.raises(InvalidParameter):
        SearchConfig.from_env({"APPROX_BUDGET": "lots"})
    with pytest.raises(InvalidParameter):
        SearchConfig.from_env({"APPROX_BUDGET": "0"})

def test_validation( ):
    with pytest.raises(InvalidParameter):
        SearchConfig(stop_rule="greedy")
    with pytest.raises(ValueError):
        SearchConfig(budget=0)
    with pytest.raises(InvalidParameter):
        SearchConfig(workers=0)
    with pytest.raises(InvalidParameter):
        SearchConfig(chunk_size=0)

    with pytest.raises(InvalidParameter):
        SearchConfig(seed_gap_tol=0)
    with pytest.raises(InvalidParameter):
        SearchConfig(seed_iterations=0)
