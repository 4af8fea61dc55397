import numpy as np
import pytest

from fraclab.barriers import (ExteriorData, capped_distance_data,
                              constant_data, coordinate_data,
                              counterexample_min_rs_1,
                              holder_point_singularity)
from fraclab.errors import DomainError, ParameterError, ReliabilityError
from fraclab.geometry import Ball, HalfPlane, unit_square
from fraclab.kernels import KernelSpec, make_fractional_laplacian
from fraclab.wos import (StableExitSampler, WoSConfig, ball_poisson,
                         halfplane_poisson, kappa_constant, sample_ball_exit,
                         solve)

from oracles import exit_law_median, exit_law_tail_prob

K05 = make_fractional_laplacian(0.5, 2)
BALL = Ball([0.0, 0.0], 1.0)


# ---------------------------------------------------------------------------
# exit law

@pytest.mark.parametrize("s", [0.2, 0.5, 0.8])
def test_cdf_knots_match_beta_closed_form(s):
    assert StableExitSampler(s).cdf_oracle_error() < 1e-8


def test_exit_tail_probability_matches_oracle():
    rng = np.random.Generator(np.random.Philox(key=42))
    n = 10 ** 6
    y = sample_ball_exit(0.5, 2, rng, n=n)
    r = np.linalg.norm(y, axis=1)
    assert np.all(r > 1.0)
    p = exit_law_tail_prob(0.5, 2.0)
    se = np.sqrt(p * (1 - p) / n)
    assert abs(np.mean(r > 2.0) - p) <= 3.0 * se


def test_exit_isotropy():
    rng = np.random.Generator(np.random.Philox(key=43))
    n = 10 ** 6
    y = sample_ball_exit(0.5, 2, rng, n=n)
    u = y / np.linalg.norm(y, axis=1, keepdims=True)
    # each direction component has variance 1/2
    se = np.sqrt(0.5 / n)
    assert np.all(np.abs(np.mean(u, axis=0)) <= 3.0 * se)


def test_exit_median_decreases_with_s():
    rng = np.random.Generator(np.random.Philox(key=44))
    med = {}
    for s in (0.1, 0.9):
        y = sample_ball_exit(s, 2, rng, n=200000)
        med[s] = np.median(np.linalg.norm(y, axis=1))
        oracle = exit_law_median(s)
        assert med[s] == pytest.approx(oracle, rel=2e-2)
    assert med[0.9] < med[0.1]


def test_exit_dim1():
    rng = np.random.Generator(np.random.Philox(key=45))
    y = sample_ball_exit(0.5, 1, rng, n=50000)
    assert y.shape == (50000, 1)
    assert np.all(np.abs(y) > 1.0)
    assert abs(np.mean(np.sign(y))) < 0.02


# ---------------------------------------------------------------------------
# solver

def test_constant_data_exact():
    out = solve(BALL, constant_data(1.0), [0.3, 0.0], K05,
                WoSConfig(paths=2000, seed=1))
    assert out.estimate == 1.0
    assert out.stderr == 0.0
    assert out.snapped_fraction < 0.05


def test_antisymmetry_at_center():
    out = solve(BALL, coordinate_data(0), [0.0, 0.0], K05,
                WoSConfig(paths=20000, seed=2))
    assert abs(out.estimate) <= 3.0 * out.stderr + 1e-3


def test_matches_poisson_quadrature():
    g = capped_distance_data([2.0, 0.0], 3.0)
    x = [0.3, 0.0]
    out = solve(BALL, g, x, K05, WoSConfig(paths=200000, seed=3))
    v, e = ball_poisson(BALL, g, x, 0.5)
    assert abs(out.estimate - v) <= 3.0 * (out.stderr + e)


def test_maximum_principle():
    g = capped_distance_data([2.0, 0.0], 3.0)
    lo, hi = 0.0, 3.0
    for i, x in enumerate(([0.0, 0.0], [0.5, 0.2], [-0.8, 0.0])):
        out = solve(BALL, g, x, K05, WoSConfig(paths=20000, seed=4),
                    point_index=i)
        assert lo - 3 * out.stderr <= out.estimate <= hi + 3 * out.stderr


def test_seed_determinism_bit_identical():
    g = holder_point_singularity(0.3, [1.0, 0.0])
    cfg = WoSConfig(paths=30000, seed=77)
    a = solve(BALL, g, [0.4, 0.1], K05, cfg)
    b = solve(BALL, g, [0.4, 0.1], K05, cfg)
    assert a.estimate == b.estimate
    assert a.stderr == b.stderr
    assert a.mean_steps == b.mean_steps
    c = solve(BALL, g, [0.4, 0.1], K05, WoSConfig(paths=30000, seed=78))
    assert c.estimate != a.estimate


def test_kappa_consistency():
    g = capped_distance_data([2.0, 0.0], 3.0)
    x = [0.2, 0.1]
    a = solve(BALL, g, x, K05, WoSConfig(paths=100000, seed=5,
                                         sphere_fraction=0.5))
    b = solve(BALL, g, x, K05, WoSConfig(paths=100000, seed=6,
                                         sphere_fraction=0.25))
    assert abs(a.estimate - b.estimate) <= 3.0 * (a.stderr + b.stderr)


def test_snap_bias_controlled():
    g = holder_point_singularity(0.3, [1.0, 0.0])
    x = [0.9, 0.0]
    base_eps = 1e-6 * BALL.diameter
    a = solve(BALL, g, x, K05, WoSConfig(paths=100000, seed=7,
                                         snap_eps=base_eps))
    b = solve(BALL, g, x, K05, WoSConfig(paths=100000, seed=8,
                                         snap_eps=2.0 * base_eps))
    bound = g.C0 * (2.0 * base_eps) ** g.alpha + 3.0 * (a.stderr + b.stderr)
    assert abs(a.estimate - b.estimate) <= bound
    assert a.bias_bound == pytest.approx(g.C0 * base_eps ** g.alpha)


def test_linearity_in_data():
    g1 = capped_distance_data([2.0, 0.0], 3.0)
    g2 = constant_data(1.0)
    a, b = 0.7, -1.3
    combo = ExteriorData(fn=lambda p: a * g1(p) + b * g2(p), alpha=0.9,
                         C0=5.0, growth=0.0)
    x = [0.25, -0.3]
    cfg = WoSConfig(paths=50000, seed=9)
    # common random numbers: same seed makes the identity nearly exact
    v_combo = solve(BALL, combo, x, K05, cfg)
    v1 = solve(BALL, g1, x, K05, cfg)
    v2 = solve(BALL, g2, x, K05, cfg)
    assert v_combo.estimate == pytest.approx(a * v1.estimate + b * v2.estimate,
                                             abs=1e-12)


def test_solver_rejects_bad_inputs():
    g = constant_data(1.0)
    with pytest.raises(DomainError):
        solve(BALL, g, [2.0, 0.0], K05, WoSConfig(paths=10))
    with pytest.raises(DomainError):
        solve(HalfPlane([0, 1]), g, [0.0, 1.0], K05, WoSConfig(paths=10))
    aniso = KernelSpec(s=0.5, dim=2, lam=1.0, Lam=1.5,
                       angular_density=lambda th: 1.0 + 0.5 * th[..., 0] ** 2)
    with pytest.raises(ParameterError):
        solve(BALL, g, [0.0, 0.0], aniso, WoSConfig(paths=10))


def test_reliability_error_on_tiny_step_budget():
    g = constant_data(1.0)
    with pytest.raises(ReliabilityError):
        solve(BALL, g, [0.0, 0.0], K05, WoSConfig(paths=1000, max_steps=1,
                                                  seed=1))


def test_polygon_domain_walks():
    sq = unit_square()
    g = holder_point_singularity(0.1, [0.0, 0.0])
    out = solve(sq, g, [0.5, 0.5], K05, WoSConfig(paths=20000, seed=10))
    assert 0.0 < out.estimate < g.C0 * (1.0 + 3.0)
    assert out.mean_steps > 1.0


def test_star_domain_walks():
    from fraclab.geometry import StarShaped
    star = StarShaped([1.0, 0.0, 0.1], gamma=1.0)
    g = capped_distance_data([2.0, 0.0], 3.0)
    out = solve(star, g, [0.2, 0.1], K05, WoSConfig(paths=20000, seed=21))
    # datum values lie in [0, 3]; the estimate must respect the bounds
    assert 0.0 < out.estimate < 3.0
    assert out.snapped_fraction < 0.05


# ---------------------------------------------------------------------------
# Poisson quadratures

def test_ball_poisson_constant():
    v, e = ball_poisson(BALL, constant_data(1.0), [0.5, 0.2], 0.5)
    assert v == pytest.approx(1.0, abs=1e-12)


def test_ball_poisson_maximum_principle():
    g = holder_point_singularity(0.3, [1.0, 0.0])
    v, e = ball_poisson(BALL, g, [0.0, 0.0], 0.5)
    assert 0.0 < v < 3.0


def test_halfplane_poisson_constant():
    v, e = halfplane_poisson(constant_data(1.0), [0.3, 0.5], 0.5)
    assert v == pytest.approx(1.0, abs=1e-6)
    v2, _ = halfplane_poisson(constant_data(1.0), [-2.0, 0.01], 0.5)
    assert v2 == pytest.approx(1.0, abs=1e-6)


def test_halfplane_poisson_rejects():
    with pytest.raises(DomainError):
        halfplane_poisson(coordinate_data(0), [0.0, 1.0], 0.5)
    with pytest.raises(DomainError):
        halfplane_poisson(constant_data(1.0), [0.0, -1.0], 0.5)


def test_counterexample_log_lower_bound():
    """u(0,t) >= c t^s log(1/t) with positive c on the acceptance window."""
    s = 0.5
    g = counterexample_min_rs_1(s)
    for t in (1e-4, 1e-3, 1e-2):
        v, e = halfplane_poisson(g, [0.0, t], s)
        ratio = v / (t ** s * np.log(1.0 / t))
        assert ratio > 0.3


def test_counterexample_ratio_flat():
    s = 0.5
    g = counterexample_min_rs_1(s)
    ts = np.geomspace(1e-4, 1e-2, 7)
    ratios = []
    for t in ts:
        v, _ = halfplane_poisson(g, [0.0, t], s)
        ratios.append(v / (t ** s * np.log(1.0 / t)))
    ratios = np.asarray(ratios)
    assert (ratios.max() - ratios.min()) / ratios.min() < 0.2


def test_kappa_constant_value():
    # int_{5pi/4}^{7pi/4} |sin|^{-s}: sanity bounds pi/2 <= k <= sqrt(2)^s pi/2
    for s in (0.3, 0.5, 0.7):
        k = kappa_constant(s)
        assert np.pi / 2 <= k <= 2 ** (s / 2) * np.pi / 2 + 1e-9
