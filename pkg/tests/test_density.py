import numpy as np
import pytest
from scipy import integrate

from tribeta import density as dn


def test_support_radius():
    assert dn.support_radius() == pytest.approx(np.sqrt(2 / np.e), rel=1e-15)
    assert dn.support_radius() == pytest.approx(0.858, abs=5e-4)


def test_density_vanishes_at_edge_and_outside():
    assert dn.limiting_density(dn.R0) == pytest.approx(0.0, abs=1e-14)
    assert dn.limiting_density(0.9) == 0.0
    assert np.all(np.asarray(dn.limiting_density(np.linspace(0.01, 0.85, 50))) > 0)


def test_total_mass():
    assert abs(dn.total_mass_quad() - 1) < 1e-10


@pytest.mark.parametrize("k", range(1, 11))
def test_radial_moments(k):
    assert abs(dn.radial_moment(k) - dn.radial_moment_quad(k)) < 1e-10 * dn.radial_moment(k) + 1e-15
    with pytest.raises(ValueError):
        dn.radial_moment(0)


def test_flat_cdf_properties():
    assert dn.limiting_flat_cdf(0.0) == 0.0
    assert dn.limiting_flat_cdf(dn.R0) == pytest.approx(1.0, abs=1e-15)
    assert dn.limiting_flat_cdf(2.0) == 1.0
    r = np.linspace(0, dn.R0, 200)
    assert np.all(np.diff(dn.limiting_flat_cdf(r)) >= 0)
    # derivative is rho(r) normalized in dr
    val, _ = integrate.quad(lambda x: float(dn.limiting_flat_density(x)), 0, 0.5)
    assert val == pytest.approx(dn.limiting_flat_cdf(0.5), rel=1e-9)
    with pytest.raises(ValueError):
        dn.limiting_flat_cdf(-0.1)


def test_area_cdf_is_mass():
    val, _ = integrate.quad(lambda r: 2 * np.pi * r * dn.limiting_density(r), 0, 0.4)
    assert dn.limiting_area_cdf(0.4) == pytest.approx(val, rel=1e-9)


def test_empirical_cdf_and_ks():
    e = dn.EmpiricalCDF.from_samples([3.0, 1.0, 2.0])
    np.testing.assert_allclose(e([0.5, 1.0, 2.5, 9.0]), [0, 1 / 3, 2 / 3, 1])
    assert dn.ks_distance(e, lambda x: np.clip(np.asarray(x) / 3, 0, 1)) == pytest.approx(1 / 3)
    with pytest.raises(ValueError):
        dn.EmpiricalCDF.from_samples([])
    with pytest.raises(ValueError):
        dn.EmpiricalCDF.radial([1j], mode="odd")


def test_flat_mode_weights_by_inverse_modulus(rng):
    # area-uniform points in the unit disc have flat-weighted CDF min(r, 1)
    r = np.sqrt(rng.random(200_000))
    z = r * np.exp(2j * np.pi * rng.random(r.size))
    assert dn.ks_distance(dn.EmpiricalCDF.radial(z, "flat"), dn.disc_flat_cdf) < 0.01
    assert dn.ks_distance(dn.EmpiricalCDF.radial(z, "area"), lambda x: np.clip(np.asarray(x) ** 2, 0, 1)) < 0.01


def test_two_sample(rng):
    a = dn.EmpiricalCDF.from_samples(rng.random(5000))
    b = dn.EmpiricalCDF.from_samples(rng.random(5000))
    assert dn.ks_two_sample(a, b) < 0.04
    assert dn.ks_two_sample(a, dn.EmpiricalCDF.from_samples(rng.random(5000) + 0.5)) > 0.4


def test_flat_histogram_of_area_uniform_moduli_is_flat(rng):
    # moduli with density proportional to r; 1/r weighting flattens them
    r = np.sqrt(rng.random(400_000))
    h = dn.radial_histogram(r, bins=20, mode="flat", r_max=1.0)
    assert np.abs(h.density - 1).max() < 0.05
    assert h.mass() == pytest.approx(1.0, abs=1e-12)


def test_area_histogram_mass_and_errors(rng):
    r = rng.random(1000) * 0.5
    h = dn.radial_histogram(r, bins=10, mode="area", r_max=0.5)
    assert h.mass() == pytest.approx(1.0)
    assert h.centres.size == 10
    with pytest.raises(ValueError):
        dn.radial_histogram(r, bins=0)
    with pytest.raises(ValueError):
        dn.radial_histogram(r, mode="x")


def test_ks_exact_sample_and_reparameterization(rng):
    u = rng.random(100_000)
    # inverse CDF of F(r) = r^2 on [0, 1]
    r = np.sqrt(u)
    e = dn.EmpiricalCDF.from_samples(r)
    d = dn.ks_distance(e, lambda x: np.clip(np.asarray(x) ** 2, 0, 1))
    assert d < 0.007
    e2 = dn.EmpiricalCDF.from_samples(r**2)
    assert dn.ks_distance(e2, lambda x: np.clip(np.asarray(x), 0, 1)) == pytest.approx(d, abs=1e-12)
    assert dn.ks_distance(dn.EmpiricalCDF.from_samples([0.5]), lambda x: np.asarray(x)) == pytest.approx(0.5)
