import numpy as np
import pytest
from scipy import stats

from tribeta import ensembles as ens
from tribeta.randsrc import RngStream


def test_storage_is_reversed():
    m = ens.TridiagMatrix(np.array([3, 2, 1.0]), np.array([20, 10.0]), np.array([200, 100.0]))
    np.testing.assert_array_equal(m.a_indexed(), [1, 2, 3])
    np.testing.assert_array_equal(m.b_indexed(), [10, 20])
    np.testing.assert_array_equal(m.btilde(), [1000, 4000])
    d = m.to_dense()
    assert d[2, 1] == 10 and d[1, 2] == 100


def test_bad_lengths():
    with pytest.raises(ValueError):
        ens.TridiagMatrix(np.ones(3), np.ones(1), np.ones(2))


@pytest.mark.parametrize("kind", ["T", "S", "Ttilde"])
def test_sampler_structure(kind):
    m = ens.sample(kind, 6, 3.0, RngStream(1, 0))
    assert m.n == 6
    if kind == "S":
        np.testing.assert_array_equal(m.sub, m.sup)
    if kind == "Ttilde":
        np.testing.assert_array_equal(m.sup, 1.0)
    np.testing.assert_allclose(m.matvec(np.arange(6.0)), m.to_dense() @ np.arange(6.0))


def _collect(kind, n, beta, count, pick):
    return np.array([pick(ens.sample(kind, n, beta, RngStream(7, j))) for j in range(count)])


def test_T_offdiagonal_laws():
    # |b_j|, |c_j| ~ chi_{beta j / 2}; b_1 sits in the last row
    n, beta = 5, 3.0
    b1 = _collect("T", n, beta, 4000, lambda m: abs(m.sub[-1]))
    c4 = _collect("T", n, beta, 4000, lambda m: abs(m.sup[0]))
    assert stats.kstest(b1, stats.chi(beta / 2).cdf).pvalue > 1e-3
    assert stats.kstest(c4, stats.chi(beta * 4 / 2).cdf).pvalue > 1e-3


def test_S_and_Ttilde_laws():
    n, beta = 4, 2.5
    s2 = _collect("S", n, beta, 4000, lambda m: abs(m.sub[-2]) * np.sqrt(2))
    assert stats.kstest(s2, stats.chi(beta * 2).cdf).pvalue > 1e-3
    t3 = _collect("Ttilde", n, beta, 4000, lambda m: abs(m.sub[0]))
    assert stats.kstest(t3, stats.chi(beta * 3).cdf).pvalue > 1e-3


def test_diagonal_is_standard_complex_normal():
    a = _collect("T", 3, 2.0, 5000, lambda m: m.diag[1])
    assert abs(a.real.var() - 1) < 0.08 and abs(a.imag.var() - 1) < 0.08


def test_scaling_and_limits():
    assert ens.scaling_factor(8, 4.0) == pytest.approx(0.125)
    d = ens.sample_D(5, RngStream(1, 1))
    np.testing.assert_allclose(np.abs(d.b_indexed()), np.sqrt(np.arange(1, 5)))
    g = ens.sample_G(5, 4.0, RngStream(1, 1))
    np.testing.assert_allclose(g.sup, 0.5)


def test_balance_preserves_spectrum():
    m = ens.sample_T(7, 2.0, RngStream(3, 3))
    b = ens.balance_to_btilde(m)
    np.testing.assert_allclose(np.sort_complex(np.linalg.eigvals(b.to_dense())), np.sort_complex(np.linalg.eigvals(m.to_dense())), atol=1e-9)
    with pytest.raises(ens.SingularTransformError):
        ens.balance_to_btilde(ens.TridiagMatrix(np.ones(2), np.ones(1), np.zeros(1)))


def test_invalid_parameters():
    with pytest.raises(ValueError):
        ens.sample_T(1, 2.0, RngStream(0, 0))
    with pytest.raises(ValueError):
        ens.sample_S(4, 0.0, RngStream(0, 0))
    with pytest.raises(ValueError):
        ens.EnsembleKind.parse("X")


def test_matrix_csv_roundtrip(tmp_path):
    m = ens.sample_T(5, 2.0, RngStream(2, 2))
    p = tmp_path / "m.csv"
    ens.write_matrix_csv(m, p, {"kind": "T"})
    back, meta = ens.read_matrix_csv(p)
    assert meta["n"] == 5 and meta["kind"] == "T"
    np.testing.assert_array_equal(back.to_dense(), m.to_dense())


def test_ginibre_scale():
    a = ens.sample_ginibre(200, RngStream(0, 0))
    assert abs(np.mean(np.abs(a) ** 2) * 200 - 1) < 0.02
