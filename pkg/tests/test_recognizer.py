import pytest

from goalrec.grid import Action, Goal, Observation, parse_map
from goalrec.priors import GoalPriorDistribution
from goalrec.recognizer import (
    AllZeroMass,
    BatchCache,
    InvalidConfig,
    ModelConfig,
    posterior,
    recognize,
)
from goalrec.solver import InfeasibleObservation


def test_posterior_uniform_prior_passthrough():
    result = posterior(GoalPriorDistribution(0.5, 0.5), [0.8, 0.2])
    assert result.p_a == pytest.approx(0.8, abs=1e-12)


def test_posterior_uninformative_likelihood():
    prior = GoalPriorDistribution(31 / 42, 11 / 42)
    result = posterior(prior, [0.5, 0.5])
    assert result.p_a == pytest.approx(prior.p_a, abs=1e-12)


def test_posterior_hand_normalized():
    result = posterior(GoalPriorDistribution(0.6, 0.4), [0.5, 0.25])
    assert result.p_a == pytest.approx(0.75, abs=1e-12)
    assert result.p_b == pytest.approx(0.25, abs=1e-12)


def test_posterior_all_zero_mass():
    with pytest.raises(AllZeroMass):
        posterior(GoalPriorDistribution(0.5, 0.5), [0.0, 0.0])


def test_invalid_configs():
    with pytest.raises(InvalidConfig):
        ModelConfig(prior_kind="nope")
    with pytest.raises(InvalidConfig):
        ModelConfig(likelihood_kind="nope")
    with pytest.raises(InvalidConfig):
        ModelConfig(n_sims=0)
    with pytest.raises(InvalidConfig):
        ModelConfig(smoothing=-0.1)


def test_prior_recovery_with_no_observations(t1, lopsided):
    for kind in ("uniform", "easiness"):
        for m in (t1, lopsided):
            report = recognize(m, [], ModelConfig(prior_kind=kind))
            assert report.final == report.prior


def test_offline_recognition_direction(t1):
    obs = [Observation(Action.UP, 0.8), Observation(Action.RIGHT, 0.5)]
    report = recognize(t1, obs, ModelConfig())
    assert report.final.p_a > 0.5
    assert len(report.steps) == 2


def test_both_goals_unsolvable_offline(corner):
    obs = [Observation(Action.UP, 1.0)]
    report = recognize(corner, obs, ModelConfig())
    assert report.final.p_a == pytest.approx(0.5, abs=1e-12)


def test_every_posterior_normalizes(t1):
    obs = [Observation(Action.UP, 0.8), Observation(Action.RIGHT, 0.5)]
    for kind in ("offline", "online", "online-action"):
        report = recognize(t1, obs, ModelConfig(likelihood_kind=kind))
        for step in report.steps:
            assert step.posterior.p_a + step.posterior.p_b == pytest.approx(1.0, abs=1e-12)


def test_likelihood_ratio_monotonicity():
    prior = GoalPriorDistribution(0.5, 0.5)
    last = 0.0
    for ll_a in (0.2, 0.4, 0.6, 0.8, 1.0):
        p = posterior(prior, [ll_a, 0.5]).p_a
        assert p > last
        last = p


def test_smoothing_bound_uniform_prior(t1):
    # Single-component likelihoods capped at 1: posterior within
    # [0.025/1.05, 1.025/1.05] under a uniform prior.
    lo, hi = 0.025 / 1.05, 1.025 / 1.05
    obs_sets = [
        [Observation(Action.UP, 0.6)],
        [Observation(Action.UP, 0.6), Observation(Action.RIGHT, 1.2)],
        [Observation(Action.UP, 0.6), Observation(Action.LEFT, 3.0)],
    ]
    for kind in ("offline", "online", "online-action"):
        for obs in obs_sets:
            report = recognize(t1, obs, ModelConfig(likelihood_kind=kind))
            for step in report.steps:
                assert lo - 1e-12 <= step.posterior.p_a <= hi + 1e-12
                assert 0.0 < step.posterior.p_a < 1.0


def test_infeasible_observation(t1):
    with pytest.raises(InfeasibleObservation):
        recognize(t1, [Observation(Action.DOWN, 1.0)], ModelConfig())


def test_determinism(t1):
    obs = [Observation(Action.UP, 0.7), Observation(Action.RIGHT, 2.0)]
    config = ModelConfig(likelihood_kind="online")
    a = recognize(t1, obs, config)
    b = recognize(t1, obs, config)
    assert a.to_dict() == b.to_dict()


def test_shared_cache_consistency(t1):
    obs = [Observation(Action.UP, 0.7)]
    config = ModelConfig(likelihood_kind="online")
    cache = BatchCache()
    with_cache = recognize(t1, obs, config, batch_cache=cache)
    again = recognize(t1, obs, config, batch_cache=cache)
    fresh = recognize(t1, obs, config)
    assert with_cache.to_dict() == again.to_dict() == fresh.to_dict()


def test_timing_changes_posterior_at_key_step():
    # Forced move then key step; online timing reacts to the pause.
    text = (
        "; id=tk\n; type=action\n; forced_moves=U\n"
        "#####\n#A.B#\n#.$.#\n#.@.#\n#####\n"
    )
    m = parse_map(text)
    config = ModelConfig(likelihood_kind="online")
    quick = recognize(m, [Observation(Action.UP, 0.5), Observation(Action.RIGHT, 0.4)], config)
    slow = recognize(m, [Observation(Action.UP, 0.5), Observation(Action.RIGHT, 6.0)], config)
    assert quick.final.p_a != slow.final.p_a


def test_report_dict_schema(t1):
    report = recognize(t1, [Observation(Action.UP, 0.9)], ModelConfig())
    doc = report.to_dict()
    assert set(doc) == {"prior", "steps", "final"}
    assert set(doc["steps"][0]) == {
        "action",
        "think_seconds",
        "per_goal",
        "smoothed",
        "posterior",
    }
    assert set(doc["steps"][0]["per_goal"]) == {"A", "B"}
