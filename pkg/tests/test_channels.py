import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coinwalk.channels import (
    Channel,
    NoiseSpec,
    average_trajectories,
    dephasing_coin,
    depolarizing_coin,
    noisy_step,
    run_noisy,
    run_trajectory,
    tunneling,
    unravel,
)
from coinwalk.dynamics import (
    PAULIS,
    CoinOperator,
    apply_coin,
    hadamard,
    shift,
    standard_schedule,
)
from coinwalk.hilbert import (
    CoinState,
    DensityOperator,
    PositionSpace,
    WindowOverflowError,
    make_initial,
    to_density,
)
from coinwalk.measurement import position_distribution, tv_distance

from conftest import coin_op_full, random_density


def density_on(space, rng) -> DensityOperator:
    return DensityOperator(space, random_density(2 * space.dim, rng))


class TestNoiseSpec:
    @pytest.mark.parametrize("bad", [-0.1, 1.1])
    def test_parameter_range(self, bad):
        with pytest.raises(ValueError):
            NoiseSpec(p=bad, enabled={Channel.DEPOLARIZING})

    def test_coin_channels_mutually_exclusive(self):
        with pytest.raises(ValueError, match="allow_combined_coin_noise"):
            NoiseSpec.from_parameters(p=0.9, p_prime=0.9)

    def test_combined_coin_noise_behind_flag(self):
        spec = NoiseSpec.from_parameters(p=0.9, p_prime=0.9, allow_combined_coin_noise=True)
        assert spec.has_coin_noise

    def test_from_parameters_enables_only_given_channels(self):
        spec = NoiseSpec.from_parameters(q=0.95)
        assert spec.enabled == frozenset({Channel.TUNNELING})
        assert spec.reach_per_step == 2
        assert NoiseSpec.from_parameters(q=1.0).reach_per_step == 1
        assert NoiseSpec.ideal().enabled == frozenset()


class TestDepolarizing:
    def test_p1_is_pure_unitary(self, rng):
        rho = density_on(PositionSpace.circle(5), rng)
        out = depolarizing_coin(rho, hadamard(), 1.0)
        ref = apply_coin(rho, hadamard())
        assert np.max(np.abs(out.matrix - ref.matrix)) < 1e-14

    def test_p0_fully_randomizes_coin(self, rng):
        # coin marginal becomes 1/2 identity at every position pair
        space = PositionSpace.circle(5)
        x = space.dim
        out = depolarizing_coin(density_on(space, rng), hadamard(), 0.0)
        b = out.blocks()
        assert np.max(np.abs(b[0, :, 1, :])) == 0.0
        assert np.max(np.abs(b[1, :, 0, :])) == 0.0
        assert np.max(np.abs(b[0, :, 0, :] - b[1, :, 1, :])) < 1e-15

    def test_matches_pauli_mixture_form(self, rng):
        # on two positions: p U rho U^dag + (1-p)/4 sum_k sigma_k rho sigma_k
        space = PositionSpace.circle(2)
        rho = density_on(space, rng)
        p = 0.73
        u_full = coin_op_full(hadamard().matrix, space.dim)
        ref = p * (u_full @ rho.matrix @ u_full.conj().T)
        for s in PAULIS:
            s_full = coin_op_full(s, space.dim)
            ref += (1 - p) / 4 * (s_full @ rho.matrix @ s_full.conj().T)
        out = depolarizing_coin(rho, hadamard(), p)
        assert np.max(np.abs(out.matrix - ref)) < 1e-14

    def test_parameter_validated(self, rng):
        with pytest.raises(ValueError):
            depolarizing_coin(density_on(PositionSpace.circle(3), rng), hadamard(), 1.5)


class TestDephasing:
    def test_p1_is_noiseless(self, rng):
        rho = density_on(PositionSpace.circle(4), rng)
        out = dephasing_coin(rho, hadamard(), 1.0)
        ref = apply_coin(rho, hadamard())
        assert np.max(np.abs(out.matrix - ref.matrix)) < 1e-14

    def test_p0_is_still_unitary(self, rng):
        # single Kraus branch: purity preserved
        rho = to_density(make_initial(PositionSpace.circle(4), CoinState.symmetric(), 1))
        out = dephasing_coin(rho, hadamard(), 0.0)
        purity = np.trace(out.matrix @ out.matrix).real
        assert purity == pytest.approx(1.0, abs=1e-12)

    def test_p_half_erases_coin_coherence(self, rng):
        # with an identity coin the off-diagonal coin blocks vanish outright
        space = PositionSpace.circle(4)
        x = space.dim
        out = dephasing_coin(density_on(space, rng), CoinOperator(np.eye(2)), 0.5)
        assert np.max(np.abs(out.matrix[:x, x:])) == 0.0
        assert np.max(np.abs(out.matrix[x:, :x])) == 0.0

    def test_error_branch_enters_with_unchanged_populations(self, rng):
        # the sigma_z error never changes coin populations: the pre-rotation
        # mixture has exactly the diagonal coin blocks of the input
        space = PositionSpace.circle(5)
        x = space.dim
        rho = density_on(space, rng)
        sz = np.kron(np.array([[1, 0], [0, -1]]), np.eye(x))
        branch = sz @ rho.matrix @ sz
        assert np.array_equal(branch[:x, :x], rho.matrix[:x, :x])
        assert np.array_equal(branch[x:, x:], rho.matrix[x:, x:])

    def test_position_distribution_matches_noiseless(self, rng):
        space = PositionSpace.circle(5)
        rho = density_on(space, rng)
        noisy = position_distribution(dephasing_coin(rho, hadamard(), 0.8)).probs
        ideal = position_distribution(apply_coin(rho, hadamard())).probs
        for k in noisy:
            assert noisy[k] == pytest.approx(ideal[k], abs=1e-14)


class TestTunneling:
    def test_q1_is_identity(self, rng):
        rho = density_on(PositionSpace.circle(4), rng)
        out = tunneling(rho, 1.0)
        assert np.array_equal(out.matrix, rho.matrix)

    def test_q0_splits_position_basis_state(self):
        space = PositionSpace.line(2)
        rho = to_density(make_initial(space, CoinState.basis(0), 0))
        out = tunneling(rho, 0.0)
        d = position_distribution(out).probs
        assert d[-1] == pytest.approx(0.5, abs=1e-15)
        assert d[1] == pytest.approx(0.5, abs=1e-15)
        assert d[0] == 0.0

    def test_margin_required_on_line(self):
        rho = to_density(make_initial(PositionSpace.line(1), CoinState.basis(0), 1))
        with pytest.raises(WindowOverflowError):
            tunneling(rho, 0.5)

    def test_circle_matches_kron_reference(self, rng):
        space = PositionSpace.circle(5)
        x = space.dim
        rho = density_on(space, rng)
        hop = np.zeros((x, x))
        for k in range(x):
            hop[(k + 1) % x, k] = 1
        u_plus = np.kron(np.eye(2), hop)
        u_minus = np.kron(np.eye(2), hop.T)
        q = 0.85
        ref = q * rho.matrix + (1 - q) / 2 * (
            u_plus @ rho.matrix @ u_plus.T + u_minus @ rho.matrix @ u_minus.T
        )
        out = tunneling(rho, q)
        assert np.max(np.abs(out.matrix - ref)) < 1e-14

    def test_breaks_parity_support(self):
        # a few noiseless steps keep parity; one tunneling application does not
        space = PositionSpace.line(6)
        rho = to_density(make_initial(space, CoinState.symmetric(), 0))
        for _ in range(4):
            rho = shift(apply_coin(rho, hadamard()))
        before = position_distribution(rho).probs
        assert all(v == 0.0 for k, v in before.items() if k % 2 != 0)
        after = position_distribution(tunneling(rho, 0.9)).probs
        assert sum(v for k, v in after.items() if k % 2 != 0) > 0.01


CHANNELS = [
    ("depolarizing", lambda rho: depolarizing_coin(rho, hadamard(), 0.8)),
    ("dephasing", lambda rho: dephasing_coin(rho, hadamard(), 0.8)),
    ("tunneling", lambda rho: tunneling(rho, 0.8)),
]


class TestChannelAlgebra:
    @pytest.mark.parametrize("name, channel", CHANNELS, ids=[c[0] for c in CHANNELS])
    def test_trace_and_hermiticity_preserved(self, name, channel, rng):
        rho = density_on(PositionSpace.circle(8), rng)
        out = channel(rho)
        assert out.trace() == pytest.approx(1.0, abs=1e-12)
        assert np.max(np.abs(out.matrix - out.matrix.conj().T)) < 1e-12

    @pytest.mark.parametrize("name, channel", CHANNELS, ids=[c[0] for c in CHANNELS])
    def test_positivity_preserved(self, name, channel, rng):
        for _ in range(5):
            rho = density_on(PositionSpace.circle(4), rng)
            out = channel(rho)
            assert np.linalg.eigvalsh(out.matrix).min() >= -1e-10

    def test_twirl_identity(self, rng):
        # (1/4) sum_k sigma_k rho sigma_k = (1/2) 1 (x) tr_coin(rho)
        space = PositionSpace.circle(6)
        x = space.dim
        rho = density_on(space, rng)
        twirled = np.zeros_like(rho.matrix)
        for s in PAULIS:
            full = coin_op_full(s, x)
            twirled += 0.25 * (full @ rho.matrix @ full.conj().T)
        coin_trace = rho.matrix[:x, :x] + rho.matrix[x:, x:]
        ref = np.kron(np.eye(2), 0.5 * coin_trace)
        assert np.max(np.abs(twirled - ref)) < 1e-14

    def test_trivial_parameters_reduce_to_noiseless_step(self, rng):
        space = PositionSpace.circle(6)
        rho = density_on(space, rng)
        spec = NoiseSpec.from_parameters(p=1.0, q=1.0)
        out = noisy_step(rho, hadamard(), spec)
        ref = shift(apply_coin(rho, hadamard()))
        assert np.max(np.abs(out.matrix - ref.matrix)) < 1e-14

    @settings(max_examples=20, deadline=None)
    @given(p=st.floats(0.0, 1.0), p_prime=st.floats(0.0, 1.0), q=st.floats(0.0, 1.0))
    def test_any_noisy_step_preserves_trace(self, p, p_prime, q):
        rng = np.random.default_rng(11)
        rho = density_on(PositionSpace.circle(5), rng)
        for spec in (
            NoiseSpec.from_parameters(p=p, q=q),
            NoiseSpec.from_parameters(p_prime=p_prime, q=q),
        ):
            out = noisy_step(rho, hadamard(), spec)
            assert out.trace() == pytest.approx(1.0, abs=1e-12)

    def test_tunnel_before_shift_variant_is_equivalent(self, rng):
        # translations all commute, so hopping before or after the shift is
        # exactly the same channel; the flag only matters for edge handling
        space = PositionSpace.circle(6)
        rho = density_on(space, rng)
        after = noisy_step(rho, hadamard(), NoiseSpec.from_parameters(q=0.9))
        before = noisy_step(rho, hadamard(), NoiseSpec.from_parameters(q=0.9, tunnel_before_shift=True))
        assert np.max(np.abs(after.matrix - before.matrix)) < 1e-14


class TestUnraveling:
    def test_p1_always_returns_the_coin(self):
        rng = np.random.default_rng(0)
        spec = NoiseSpec.from_parameters(p=1.0)
        for _ in range(200):
            br = unravel(spec, hadamard(), rng)
            assert np.array_equal(br.coin, hadamard().matrix)
            assert br.tunnel == 0

    def test_branch_frequencies_match_probabilities(self):
        p = 0.6
        draws = 100_000
        tol = 4 / np.sqrt(draws)
        rng = np.random.default_rng(42)
        spec = NoiseSpec.from_parameters(p=p)
        h = hadamard().matrix
        u_count = 0
        pauli_counts = np.zeros(4)
        for _ in range(draws):
            br = unravel(spec, hadamard(), rng)
            if np.array_equal(br.coin, h):
                u_count += 1
            else:
                for i, s in enumerate(PAULIS):
                    if np.array_equal(br.coin, s):
                        pauli_counts[i] += 1
                        break
        assert u_count / draws == pytest.approx(p, abs=tol)
        for c in pauli_counts:
            assert c / draws == pytest.approx((1 - p) / 4, abs=tol)

    def test_tunnel_branch_frequencies(self):
        q = 0.8
        draws = 100_000
        tol = 4 / np.sqrt(draws)
        rng = np.random.default_rng(7)
        spec = NoiseSpec.from_parameters(q=q)
        tunnels = [unravel(spec, hadamard(), rng).tunnel for _ in range(draws)]
        counts = {t: tunnels.count(t) / draws for t in (-1, 0, 1)}
        assert counts[0] == pytest.approx(q, abs=tol)
        assert counts[1] == pytest.approx((1 - q) / 2, abs=tol)
        assert counts[-1] == pytest.approx((1 - q) / 2, abs=tol)

    def test_trajectory_average_approaches_exact_channel(self):
        n, m = 50, 1000
        space = PositionSpace.line(n)
        schedule = standard_schedule(hadamard(), n)
        spec = NoiseSpec.from_parameters(p=0.9)
        exact = position_distribution(run_noisy(space, schedule, CoinState.symmetric(), spec)).probs
        avg = average_trajectories(space, schedule, CoinState.symmetric(), spec, m, seed=5)
        emp = {int(k): float(v) for k, v in zip(space.positions(), avg)}
        assert tv_distance(exact, emp) < 3 / np.sqrt(m)

    def test_trajectory_reproducible_for_fixed_stream(self):
        space = PositionSpace.line(12)
        schedule = standard_schedule(hadamard(), 12)
        spec = NoiseSpec.from_parameters(p=0.7)
        a = run_trajectory(space, schedule, CoinState.symmetric(), spec, np.random.default_rng(3))
        b = run_trajectory(space, schedule, CoinState.symmetric(), spec, np.random.default_rng(3))
        assert np.array_equal(a.amps, b.amps)

    def test_average_is_deterministic_given_seed(self):
        space = PositionSpace.line(10)
        schedule = standard_schedule(hadamard(), 10)
        spec = NoiseSpec.from_parameters(p=0.8)
        a = average_trajectories(space, schedule, CoinState.symmetric(), spec, 50, seed=9)
        b = average_trajectories(space, schedule, CoinState.symmetric(), spec, 50, seed=9)
        assert np.array_equal(a, b)


class TestEngine:
    def test_engine_matches_stepwise_channel_application(self):
        space = PositionSpace.line(24)
        spec = NoiseSpec.from_parameters(p=0.9, q=0.9)
        schedule = standard_schedule(hadamard(), 12)
        via_engine = run_noisy(space, schedule, CoinState.symmetric(), spec)
        rho = to_density(make_initial(space, CoinState.symmetric(), 0))
        for s in schedule:
            rho = noisy_step(rho, s.coin, spec)
        assert np.array_equal(via_engine.matrix, rho.matrix)

    def test_window_check_accounts_for_tunneling(self):
        space = PositionSpace.line(10)
        schedule = standard_schedule(hadamard(), 10)
        with pytest.raises(WindowOverflowError):
            run_noisy(space, schedule, CoinState.symmetric(), NoiseSpec.from_parameters(q=0.9))
