import numpy as np
import pytest
from scipy import stats

from tribeta import lowtemp as lt
from tribeta.eigensolve import eigen_pairs, eigenvalues_qr
from tribeta.ensembles import sample_T, TridiagMatrix
from tribeta.randsrc import RngStream


def test_chi_quantile_against_scipy():
    u = np.array([0.01, 0.3, 0.5, 0.99])
    for k in (1.0, 7.5, 1e4):
        np.testing.assert_allclose(lt.chi_quantile(k, u), stats.chi(k).ppf(u), rtol=1e-10)


def test_coupled_draw_marginals():
    # at fixed beta the coupled matrix has the ensemble's chi moduli
    vals = [abs(lt.coupled_family("D", 3, [10.0, 1e3, 1e5], RngStream(1, j)).matrix(10.0).sub[-1]) for j in range(3000)]
    assert stats.kstest(vals, stats.chi(5.0).cdf).pvalue > 1e-3


def test_offsets_are_the_limit():
    draw = lt.coupled_family("D", 5, [1e2, 1e4, 1e8], RngStream(2, 0))
    beta = 1e8
    diff = draw.matrix(beta).to_dense() - draw.leading_term(beta).to_dense()
    np.testing.assert_allclose(diff, draw.offsets().to_dense(), atol=1e-3)
    g = lt.coupled_family("G", 5, [1e2, 1e4, 1e8], RngStream(2, 0))
    diff = g.matrix(beta).to_dense() - g.leading_term(beta).to_dense()
    np.testing.assert_allclose(diff, g.offsets().to_dense(), atol=1e-3)


def test_bad_family_args():
    with pytest.raises(ValueError):
        lt.coupled_family("X", 4, [10, 100], RngStream(0, 0))
    with pytest.raises(ValueError):
        lt.coupled_family("D", 4, [100, 10], RngStream(0, 0))
    with pytest.raises(ValueError):
        lt.coupled_family("D", 4, [1, 100], RngStream(0, 0))
    with pytest.raises(ValueError):
        lt.coupled_family("G", 4, [10, 100], RngStream(0, 0)).limit()
    with pytest.raises(ValueError):
        lt.convergence_rate(lt.coupled_family("D", 4, [10, 100], RngStream(0, 0)))


@pytest.mark.parametrize("kind", ["D", "G"])
def test_rate_is_half(kind):
    rep = lt.convergence_rate(lt.coupled_family(kind, 6, [1e2, 1e4, 1e6], RngStream(3, 0)))
    assert -0.65 < rep.slope < -0.4


def test_perturbation_first_order(rng):
    a = sample_T(6, 2.0, RngStream(4, 0))
    b = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    eps = 1e-6
    pairs = eigen_pairs(a, eigenvalues_qr(a))
    pred = lt.perturbation_prediction(a, b, eps, pairs)
    exact = np.linalg.eigvals(a.to_dense() + eps * b)
    for p in pred:
        assert np.min(np.abs(exact - p)) < 1e-9


def test_eigenvector_formula():
    for kind in ("D", "G"):
        d = lt.coupled_family(kind, 8, [1e2, 1e4, 1e6], RngStream(5, 0)).limit(100.0)
        for lam in eigenvalues_qr(d).eigenvalues:
            assert lt.eigenvector_formula_residual(d, lam) < 1e-8
    t = sample_T(7, 2.0, RngStream(5, 1))
    lam = eigenvalues_qr(t).eigenvalues[0]
    u, y = lt.charpoly_eigenvectors(t, lam)
    assert np.linalg.norm(t.transpose().matvec(y) - lam * y) < 1e-8 * np.linalg.norm(y) * t.frobenius()


def test_fluctuation_routes_agree():
    draw = lt.coupled_family("D", 6, [1e2, 1e4, 1e6], RngStream(6, 0))
    a = lt.fluctuation_prediction(draw)
    b = lt.eigenvector_fluctuation(draw)
    np.testing.assert_allclose(a, b, atol=1e-10)
    meas = lt.measured_fluctuation(draw, 1e8)
    assert np.abs(meas - a).max() < 1e-2
    with pytest.raises(ValueError):
        lt.fluctuation_prediction(lt.coupled_family("G", 6, [1e2, 1e4, 1e6], RngStream(6, 0)))


def test_chi_limit_small():
    mean, var = lt.chi_limit_stats(1e4, 20_000, RngStream(7, 0))
    assert abs(mean) < 0.03 and abs(var - 0.5) < 0.03
