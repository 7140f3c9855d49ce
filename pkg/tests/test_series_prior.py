"""Random series priors: enumeration, nested sampling, projections, moments.

The load-bearing contract is per-index determinism: coefficients are drawn
from index-keyed substreams, so enlarging the window never changes the
coefficients already present and projection commutes with sampling.
"""

import io
import math

import numpy as np
import pytest
import scipy.stats as st

from cbayes import (
    FieldSample,
    SeriesPrior,
    admissibility_check,
    estimate_exp_moment,
    evaluate_field,
    marginal_convexity_test,
    project,
    sample_coefficients,
    sample_field,
)
from cbayes.measures1d import Gamma, Gaussian, Laplace
from cbayes.series_prior import (
    AbstractOrthonormal,
    AlgebraicFourier,
    AlgebraicSequence,
    ExplicitSchedule,
    FourierCircle,
    Hierarchical,
    IID,
    coefficient_weights,
    field_to_csv,
    orthonormality_probe,
)

BASIS = FourierCircle()


def laplace_prior(s=1.25, dilation=1.0):
    return SeriesPrior(BASIS, AlgebraicFourier(s), IID(Laplace(0.0, 1.0)), dilation)


def hierarchical_prior(s=1.0):
    return SeriesPrior(BASIS, AlgebraicFourier(s), Hierarchical(Gamma(2.0, 1.0), Gaussian(0.0, 1.0)))


# ---------------------------------------------------------------- enumeration


def test_window_indices_contract():
    assert list(BASIS.window_indices(1)) == [0, -1]
    assert list(BASIS.window_indices(2)) == [0, 1, -1, -2]
    assert list(BASIS.window_indices(4)) == [0, 1, -1, 2, -2, 3, -3, -4]
    for n in (1, 2, 3, 8, 17):
        idx = BASIS.window_indices(n)
        assert len(idx) == 2 * n
        assert len(set(idx)) == 2 * n
        # the signed window {-n, ..., n-1}
        assert set(idx) == set(range(-n, n))
    with pytest.raises(ValueError):
        BASIS.window_indices(0)


def test_windows_are_nested():
    for n in (1, 2, 5, 9):
        small = set(int(k) for k in BASIS.window_indices(n))
        big = set(int(k) for k in BASIS.window_indices(n + 1))
        assert small < big
        assert big - small == {n, -(n + 1)}


def test_slot_uids_are_distinct():
    uids = [BASIS.slot_uid(int(k)) for k in BASIS.window_indices(40)]
    assert len(set(uids)) == len(uids)
    assert all(u >= 0 for u in uids)


def test_basis_functions_pointwise():
    x = np.array([0.0, 0.25, 1.0 / 3.0])
    assert np.allclose(BASIS.evaluate(0, x), 1.0)
    assert np.allclose(BASIS.evaluate(2, x), math.sqrt(2) * np.cos(4 * math.pi * x))
    assert np.allclose(BASIS.evaluate(-3, x), math.sqrt(2) * np.sin(6 * math.pi * x))


def test_basis_orthonormal_on_window():
    assert orthonormality_probe(BASIS, 8) < 1e-12


# ------------------------------------------------------------------ schedules


def test_algebraic_fourier_weights():
    w = coefficient_weights(BASIS, AlgebraicFourier(1.5), 3)
    idx = BASIS.window_indices(3).astype(float)
    assert np.allclose(w, (1.0 + idx**2) ** -1.5)


def test_algebraic_sequence_weights_follow_enumeration():
    w = coefficient_weights(BASIS, AlgebraicSequence(2.0), 3)
    assert np.allclose(w, np.arange(1, 7, dtype=float) ** -2.0)


def test_explicit_schedule_validation():
    with pytest.raises(ValueError):
        ExplicitSchedule(())
    with pytest.raises(ValueError):
        ExplicitSchedule((1.0, -0.5))
    with pytest.raises(ValueError):
        ExplicitSchedule((0.5, 1.0))  # increasing
    with pytest.raises(ValueError):
        coefficient_weights(BASIS, ExplicitSchedule((1.0,)), 2)
    w = coefficient_weights(BASIS, ExplicitSchedule((4.0, 3.0, 2.0, 1.0)), 2)
    assert np.allclose(w, [4.0, 3.0, 2.0, 1.0])


def test_prior_validation():
    with pytest.raises(ValueError):
        SeriesPrior(BASIS, AlgebraicFourier(1.0), IID(Laplace()), dilation=0.0)
    with pytest.raises(ValueError):
        SeriesPrior(BASIS, AlgebraicFourier(1.0), IID(Laplace()), dilation=1.5)
    with pytest.raises(TypeError):
        SeriesPrior(BASIS, AlgebraicFourier(1.0), Laplace())
    with pytest.raises(TypeError):
        IID("not a distribution")


# ------------------------------------------------------------------- sampling


def test_sample_field_deterministic():
    p = laplace_prior()
    a = sample_field(p, 8, seed=3)
    b = sample_field(p, 8, seed=3)
    assert np.array_equal(a.coefficients, b.coefficients)
    assert not np.array_equal(a.coefficients, sample_field(p, 8, seed=4).coefficients)


def test_projection_commutes_with_sampling():
    # enlarging the window must preserve existing coefficients exactly
    p = laplace_prior()
    for small, big in [(1, 2), (4, 8), (8, 16), (16, 17)]:
        direct = sample_field(p, small, seed=11)
        projected = project(sample_field(p, big, seed=11), small)
        assert np.array_equal(direct.indices, projected.indices)
        assert np.array_equal(direct.coefficients, projected.coefficients)


def test_projection_commutes_for_hierarchical_law():
    p = hierarchical_prior()
    direct = sample_field(p, 4, seed=5)
    projected = project(sample_field(p, 12, seed=5), 4)
    assert np.array_equal(direct.coefficients, projected.coefficients)


def test_sample_coefficients_first_row_matches_single_draw():
    p = laplace_prior()
    mat = sample_coefficients(p, 6, 5, seed=2)
    assert mat.shape == (5, 12)
    assert np.array_equal(mat[0], sample_field(p, 6, seed=2).coefficients)
    with pytest.raises(ValueError):
        sample_coefficients(p, 6, 0, seed=2)


def test_dilation_scales_samples_linearly():
    full = sample_field(laplace_prior(dilation=1.0), 4, seed=7)
    half = sample_field(laplace_prior(dilation=0.5), 4, seed=7)
    assert np.allclose(half.coefficients, 0.5 * full.coefficients)


def test_norm_monotone_under_projection():
    u = sample_field(laplace_prior(), 32, seed=1)
    norms = [project(u, m).norm_l2 for m in (1, 2, 4, 8, 16, 32)]
    assert all(a <= b + 1e-15 for a, b in zip(norms, norms[1:]))
    assert norms[-1] == pytest.approx(u.norm_l2)


def test_project_validation_and_idempotence():
    u = sample_field(laplace_prior(), 8, seed=0)
    v = project(u, 3)
    assert v.truncation == 3
    assert np.array_equal(project(v, 3).coefficients, v.coefficients)
    with pytest.raises(ValueError):
        project(v, 8)


def test_field_sample_validates_alignment():
    with pytest.raises(ValueError):
        FieldSample(BASIS, 2, np.array([0, 1, -1, -2]), np.array([1.0, 2.0]))


def test_evaluate_field_matches_manual_sum():
    u = sample_field(laplace_prior(), 4, seed=9)
    x = np.array([0.0, 0.3, 0.77])
    manual = sum(
        c * BASIS.evaluate(int(k), x) for k, c in zip(u.indices, u.coefficients)
    )
    assert np.allclose(evaluate_field(u, x), manual)


def test_field_to_csv_round_trips():
    u = sample_field(laplace_prior(), 3, seed=13)
    text = field_to_csv(u)
    lines = text.strip().splitlines()
    assert lines[0] == "index,coefficient"
    assert len(lines) == 1 + len(u.indices)
    parsed = [ln.split(",") for ln in lines[1:]]
    assert [int(k) for k, _ in parsed] == [int(k) for k in u.indices]
    assert np.array_equal(np.array([float(c) for _, c in parsed]), u.coefficients)
    # plain decimal text, no numpy repr noise
    assert "np." not in text


def test_coefficient_marginals_match_declared_laws():
    # KS of each sampled column against the scaled 1-D law
    p = laplace_prior(s=1.0)
    n = 4000
    mat = sample_coefficients(p, 2, n, seed=21)
    laws = p.coefficient_laws(2)
    for col, law in zip(mat.T, laws):
        stat = st.kstest(col, lambda t: np.asarray(law.cdf(t), dtype=float)).statistic
        assert stat < 1.6276 / math.sqrt(n)


def test_hierarchical_coefficient_variance():
    # zeta*xi with Gamma(2, scale 1) and Gaussian(0,1): Var = E[zeta^2] = 6
    p = hierarchical_prior(s=1.0)
    n = 200000
    mat = sample_coefficients(p, 1, n, seed=4)
    w = coefficient_weights(BASIS, p.schedule, 1)
    for col, gamma in zip(mat.T, w):
        var = np.var(col)
        se = np.std(col**2) / math.sqrt(n)
        assert abs(var - 6.0 * gamma**2) < 4 * se
    assert p.coefficient_laws(1) is None


def test_empirical_l2_norm_stabilizes():
    # mean ||u||^2 changes by < 1% when the window doubles past N = 64
    p = laplace_prior()
    n = 3000

    def mean_sq(level):
        mat = sample_coefficients(p, level, n, seed=17)
        return float(np.mean(np.sum(mat * mat, axis=1)))

    m64, m128 = mean_sq(64), mean_sq(128)
    assert abs(m128 - m64) / m64 < 0.01


# ------------------------------------------------------------- admissibility


def test_admissibility_accepts_decaying_schedule():
    rep = admissibility_check(laplace_prior(s=1.25), p=1.0, q=math.inf, K=4096)
    assert rep.passed and rep.heuristic
    assert rep.gamma_cauchy and rep.var_cauchy and rep.conjugate_ok


def test_admissibility_rejects_flat_schedule():
    rep = admissibility_check(laplace_prior(s=0.0), p=1.0, q=math.inf, K=4096)
    assert not rep.passed
    assert not rep.gamma_cauchy


def test_admissibility_validates_exponents():
    with pytest.raises(ValueError):
        admissibility_check(laplace_prior(), p=0.5, q=2.0, K=64)
    with pytest.raises(ValueError):
        admissibility_check(laplace_prior(), p=1.0, q=math.inf, K=1)


# ------------------------------------------------------------------ exp moment


def test_exp_moment_zero_eps_is_one():
    rep = estimate_exp_moment(laplace_prior(), eps=0.0, N=8, num_samples=2000, seed=0)
    assert rep.estimate == 1.0
    assert rep.stderr == 0.0
    assert not rep.flagged


def test_exp_moment_finite_case_stable():
    rep = estimate_exp_moment(laplace_prior(), eps=0.1, N=64, num_samples=20000, seed=0)
    assert math.isfinite(rep.estimate)
    assert not rep.saturated
    assert rep.doubling_drift < 0.02
    assert not rep.flagged


def test_exp_moment_divergent_single_mode_flagged():
    # one unit-rate Laplace mode with eps = 2: E exp(2|xi|) diverges
    basis = AbstractOrthonormal(lambda n, x: np.ones_like(x))
    p = SeriesPrior(basis, ExplicitSchedule((1.0,)), IID(Laplace(0.0, 1.0)))
    rep = estimate_exp_moment(p, eps=2.0, N=1, num_samples=100000, seed=0)
    assert rep.flagged
    assert rep.saturated or rep.doubling_drift >= 0.02


def test_exp_moment_saturation_sets_flags():
    basis = AbstractOrthonormal(lambda n, x: np.ones_like(x))
    p = SeriesPrior(basis, ExplicitSchedule((1.0,)), IID(Gaussian(0.0, 100.0)))
    rep = estimate_exp_moment(p, eps=50.0, N=1, num_samples=5000, seed=1)
    assert rep.saturated and rep.flagged
    assert math.isinf(rep.estimate)


def test_exp_moment_validates_sample_count():
    with pytest.raises(ValueError):
        estimate_exp_moment(laplace_prior(), eps=0.1, N=4, num_samples=1, seed=0)


# ---------------------------------------------------------- marginal convexity


def test_marginal_convexity_equal_boxes_pass():
    rep = marginal_convexity_test(
        laplace_prior(), [{0: 1.0}], [(-1.0, 1.0)], [(-1.0, 1.0)],
        lam=0.5, N=4, num_samples=20000, seed=0,
    )
    assert rep.passed
    assert abs(rep.margin) <= 3 * rep.combined_stderr + 1e-12


def test_marginal_convexity_laplace_strict_oracle():
    # index-0 marginal is Laplace(0,1) when the weight there is 1
    rep = marginal_convexity_test(
        laplace_prior(), [{0: 1.0}], [(-1.0, 1.0)], [(1.0, 3.0)],
        lam=0.5, N=4, num_samples=100000, seed=0,
    )
    assert rep.passed
    assert rep.lhs == pytest.approx(0.5 * (1 - math.exp(-2)), abs=3 * rep.lhs_stderr)
    e = math.exp(-1.0)
    rhs_oracle = math.sqrt((1 - e) * 0.5 * (e - math.exp(-3)))
    assert rep.rhs == pytest.approx(rhs_oracle, abs=3 * rep.rhs_stderr)


def test_marginal_convexity_two_dimensional_gaussian_oracle():
    # independent Gaussian marginals: box masses factor into CDF products
    p = SeriesPrior(BASIS, AlgebraicFourier(0.0), IID(Gaussian(0.0, 1.0)))
    A = [(-1.0, 0.5), (-0.5, 1.0)]
    B = [(0.0, 2.0), (0.5, 2.5)]
    rep = marginal_convexity_test(
        p, [{0: 1.0}, {1: 1.0}], A, B, lam=0.4, N=2, num_samples=200000, seed=2,
    )
    assert rep.passed

    def box_mass(box):
        g = Gaussian(0.0, 1.0)
        m = 1.0
        for lo, hi in box:
            m *= g.cdf(hi) - g.cdf(lo)
        return m

    lam = 0.4
    C = [(lam * a0 + (1 - lam) * b0, lam * a1 + (1 - lam) * b1)
         for (a0, a1), (b0, b1) in zip(A, B)]
    assert rep.lhs == pytest.approx(box_mass(C), abs=4 * rep.lhs_stderr)
    rhs = box_mass(A) ** lam * box_mass(B) ** (1 - lam)
    assert rep.rhs == pytest.approx(rhs, abs=4 * rep.rhs_stderr)


def test_marginal_convexity_random_linear_functionals():
    # 1-D images of the prior under 5 random functionals stay convex
    gen = np.random.default_rng(31)
    p = laplace_prior()
    for _ in range(5):
        i, j = gen.choice(np.arange(-3, 4), size=2, replace=False)
        w1, w2 = gen.uniform(-2, 2, 2)
        lo = gen.uniform(-1.5, -0.2)
        width_a, width_b = gen.uniform(0.4, 1.5, 2)
        shift = gen.uniform(0.0, 1.0)
        rep = marginal_convexity_test(
            p,
            [{int(i): float(w1), int(j): float(w2)}],
            [(lo, lo + width_a)],
            [(lo + shift, lo + shift + width_b)],
            lam=0.5, N=4, num_samples=30000, seed=int(gen.integers(1 << 30)),
        )
        assert rep.passed


def test_marginal_convexity_validation():
    p = laplace_prior()
    with pytest.raises(ValueError):
        marginal_convexity_test(p, [{0: 1.0}], [(1.0, -1.0)], [(0.0, 1.0)],
                                lam=0.5, N=2, num_samples=100, seed=0)
    with pytest.raises(ValueError):
        marginal_convexity_test(p, [{0: 1.0}], [(-1.0, 1.0)], [(0.0, 1.0)],
                                lam=0.0, N=2, num_samples=100, seed=0)
    with pytest.raises(ValueError):
        marginal_convexity_test(p, [{9: 1.0}], [(-1.0, 1.0)], [(0.0, 1.0)],
                                lam=0.5, N=2, num_samples=100, seed=0)
    with pytest.raises(ValueError):
        marginal_convexity_test(p, [{0: 1.0, 1: 1.0, 2: 1.0}], [(-1.0, 1.0)],
                                [(0.0, 1.0)], lam=0.5, N=4, num_samples=100, seed=0)
