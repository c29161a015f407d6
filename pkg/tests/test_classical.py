import numpy as np
import pytest

from coinwalk.classical import ClassicalDistribution, binomial_walk, classical_dp_step, run_dp


class TestBinomialWalk:
    def test_two_steps(self):
        probs = binomial_walk(2).probs
        assert probs == {-2: 0.25, 0: 0.5, 2: 0.25}

    def test_zero_steps(self):
        assert binomial_walk(0).probs == {0: 1.0}

    def test_std_dev_is_sqrt_n(self):
        assert binomial_walk(200).std_dev() == pytest.approx(np.sqrt(200), abs=1e-9)

    def test_normalized_for_large_n(self):
        assert binomial_walk(1000).total() == pytest.approx(1.0, abs=1e-12)

    def test_exactly_symmetric(self):
        probs = binomial_walk(31).probs
        for k in probs:
            assert probs[k] == probs[-k]

    def test_parity_support(self):
        assert all(k % 2 == 1 or k % 2 == -1 for k in binomial_walk(7).probs)
        assert all(k % 2 == 0 for k in binomial_walk(8).probs)

    def test_negative_steps_rejected(self):
        with pytest.raises(ValueError):
            binomial_walk(-1)


class TestDPStep:
    def test_matches_binomial_without_barriers(self):
        dist = ClassicalDistribution({0: 1.0})
        for _ in range(30):
            dist, absorbed = classical_dp_step(dist)
            assert absorbed == 0.0
        expected = binomial_walk(30).probs
        for k, v in expected.items():
            assert dist.probs.get(k, 0.0) == pytest.approx(v, abs=1e-12)

    def test_barrier_forces_split(self):
        dist, absorbed = classical_dp_step(ClassicalDistribution({0: 1.0}), barriers={-1})
        assert absorbed == 0.5
        assert dist.probs == {1: 0.5}

    def test_mass_conserved_with_barriers(self):
        run = run_dp(200, barriers=[-5])
        dist = run.final
        assert dist.total() + run.cumulative[-1] == pytest.approx(1.0, abs=1e-12)
        # and stepwise
        dist = ClassicalDistribution({0: 1.0})
        total_absorbed = 0.0
        for _ in range(50):
            dist, absorbed = classical_dp_step(dist, barriers={-5})
            total_absorbed += absorbed
            assert dist.total() + total_absorbed == pytest.approx(1.0, abs=1e-12)


class TestRunDP:
    def test_cumulative_nondecreasing(self):
        run = run_dp(400, barriers=[-10])
        assert all(b >= a for a, b in zip(run.cumulative, run.cumulative[1:]))

    def test_absorption_grows_toward_unity(self):
        # recurrent walk: the barrier is eventually hit with probability 1
        run = run_dp(1000, barriers=[-10])
        assert run.cumulative[-1] > 0.75
        assert run.cumulative[-1] > run.cumulative[399]

    def test_start_on_barrier_rejected(self):
        with pytest.raises(ValueError):
            run_dp(10, barriers=[0])

    def test_two_sided_barriers_absorb_almost_everything(self):
        run = run_dp(300, barriers=[-4, 4])
        assert run.cumulative[-1] > 0.99
