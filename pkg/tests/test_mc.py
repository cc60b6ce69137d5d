import io
import math

import numpy as np
import pytest

from gbm_exfun import (GbmParams, InversionConfig, McConfig, ccdf_transform, cdf_at, empirical_cdf,
                       empirical_pdf, moment_first, pdf_at, simulate_integrals)
from gbm_exfun.mc import dump_samples_csv, silverman_bandwidth, time_grid


def test_config_validation():
    for bad in (dict(paths=0), dict(steps_per_unit_time=0), dict(horizon=0.0), dict(seed=-1),
                dict(seed=2 ** 64), dict(integrator="simpson")):
        with pytest.raises(ValueError):
            McConfig(**bad)


def test_time_grid_contains_requested_points():
    dts, idx = time_grid([0.25, 0.333, 1.0], 10)
    nodes = np.cumsum(dts)
    assert np.allclose(nodes[idx], [0.25, 0.333, 1.0], atol=1e-12)
    assert np.all(dts > 0)


def test_t_points_validation():
    p = GbmParams(0, 1)
    cfg = McConfig(paths=4, horizon=1.0)
    for bad in ([], [0.5, 0.5], [0.0, 1.0], [0.5, 2.0]):
        with pytest.raises(ValueError):
            simulate_integrals(p, cfg, bad)


def test_reproducible_and_thread_independent(monkeypatch):
    p = GbmParams(0.2, 0.9)
    cfg = McConfig(paths=3000, steps_per_unit_time=100, horizon=2.0, seed=99)
    monkeypatch.setenv("GBM_EXFUN_THREADS", "1")
    a = simulate_integrals(p, cfg, [0.5, 2.0])
    monkeypatch.setenv("GBM_EXFUN_THREADS", "4")
    b = simulate_integrals(p, cfg, [0.5, 2.0])
    assert np.array_equal(a, b)
    c = simulate_integrals(p, McConfig(paths=3000, steps_per_unit_time=100, horizon=2.0, seed=100), [0.5, 2.0])
    assert not np.array_equal(a, c)


def test_paths_do_not_depend_on_blocking():
    p = GbmParams(0.0, 1.0)
    big = simulate_integrals(p, McConfig(paths=70_000, steps_per_unit_time=8, seed=3), [1.0])
    small = simulate_integrals(p, McConfig(paths=10, steps_per_unit_time=8, seed=3), [1.0])
    assert np.array_equal(big[:10], small)


def test_deterministic_limit():
    s = simulate_integrals(GbmParams(0.0, 1e-8), McConfig(paths=200, horizon=2.0, seed=1), [2.0])
    assert np.all(np.abs(s - 2.0) <= 1e-6)


def test_strictly_increasing_in_t():
    s = simulate_integrals(GbmParams(-0.3, 1.5), McConfig(paths=2000, steps_per_unit_time=50, horizon=3.0),
                           [0.5, 1.0, 1.01, 3.0])
    assert np.all(np.diff(s, axis=1) > 0)


@pytest.mark.parametrize("mu, sigma, t", [(0, 1, 1), (1, 1, 2), (-0.5, 0.8, 1)])
def test_mean_matches_first_moment(mu, sigma, t):
    p = GbmParams(mu, sigma)
    s = simulate_integrals(p, McConfig(paths=100_000, steps_per_unit_time=200, horizon=t, seed=17), [t])[:, 0]
    se = s.std(ddof=1) / math.sqrt(s.size)
    assert abs(s.mean() - moment_first(p, t)) <= 4 * se


def test_trapezoid_and_left_riemann_gap_halves():
    # same seed -> same paths; the gap is (dt/2) * mean(1 - exp(-X_t)) exactly
    p = GbmParams(0.0, 1.0)
    gaps = []
    for n in (10, 20, 40):
        est = {}
        for integ in ("trapezoid", "riemann_left"):
            cfg = McConfig(paths=20_000, steps_per_unit_time=n, seed=4, integrator=integ)
            est[integ] = simulate_integrals(p, cfg, [1.0])[:, 0].mean()
        gaps.append(est["trapezoid"] - est["riemann_left"])
    assert gaps[0] / gaps[1] == pytest.approx(2.0, rel=0.1)
    assert gaps[1] / gaps[2] == pytest.approx(2.0, rel=0.1)


def test_richardson_left_riemann_is_first_order():
    p = GbmParams(0.0, 1.0)
    means = [simulate_integrals(p, McConfig(paths=400_000, steps_per_unit_time=n, seed=5,
                                            integrator="riemann_left"), [1.0])[:, 0].mean()
             for n in (2, 4, 8)]
    d = np.diff(means)
    assert d[0] / d[1] == pytest.approx(2.0, rel=0.25)


@pytest.mark.parametrize("integ", ["trapezoid", "riemann_left"])
def test_richardson_cdf_differences_shrink(integ):
    p = GbmParams(0.0, 1.0)
    cdfs = [empirical_cdf(simulate_integrals(p, McConfig(paths=1_000_000, steps_per_unit_time=n, seed=1,
                                                          integrator=integ), [1.0])[:, 0], 1.0).value
            for n in (2, 4, 8)]
    d = np.abs(np.diff(cdfs))
    assert d[1] < d[0] / 2


def test_empirical_cdf_basics():
    rng = np.random.default_rng(0)
    s = rng.exponential(size=10_001)
    assert empirical_cdf(s, s.min() - 1).value == 0
    assert empirical_cdf(s, s.max() + 1).value == 1
    e = empirical_cdf(s, np.median(s))
    assert abs(e.value - 0.5) <= 1 / math.sqrt(s.size)
    assert e.std_error == pytest.approx(math.sqrt(e.value * (1 - e.value) / s.size))
    assert e.n_effective == s.size and e.bias_note == "first_order_in_dt"
    with pytest.raises(ValueError):
        empirical_cdf([], 1.0)


def test_empirical_pdf_unit_mass():
    rng = np.random.default_rng(1)
    s = rng.lognormal(size=20_000)
    h = silverman_bandwidth(s)
    grid = np.linspace(s.min() - 6 * h, s.max() + 6 * h, 20_001)
    dens = [empirical_pdf(s, y, h).value for y in grid[::50]]
    mass = np.trapezoid(dens, grid[::50])
    assert mass == pytest.approx(1.0, abs=0.01)


def test_single_sample_kde_is_the_kernel():
    for y in (-1.0, 0.0, 0.3, 2.0):
        e = empirical_pdf([0.0], y, bandwidth=0.5)
        assert e.value == pytest.approx(math.exp(-0.5 * (y / 0.5) ** 2) / (0.5 * math.sqrt(2 * math.pi)))
        assert e.bandwidth == 0.5
    with pytest.raises(ValueError):
        empirical_pdf([0.0], 0.0, bandwidth=0.0)


def test_dump_samples_csv():
    buf = io.StringIO()
    dump_samples_csv(buf, np.array([[1.0, 2.5], [0.5, 0.75]]), [0.5, 1.0])
    lines = buf.getvalue().splitlines()
    assert lines[0] == "path_id,t,I_t"
    assert lines[1:] == ["0,0.5,1.0", "0,1.0,2.5", "1,0.5,0.5", "1,1.0,0.75"]


def _laplace_of_ccdf_mc(params, y, z, paths=20_000, horizon=25.0, spu=50, seed=21):
    # per path: int_0^inf e^{-zt} 1{I_t > y} dt = e^{-z tau} / z with tau the hitting time of y
    t_points = np.arange(1, int(horizon * 20) + 1) / 20.0
    s = simulate_integrals(params, McConfig(paths=paths, steps_per_unit_time=spu, horizon=horizon,
                                            seed=seed), t_points)
    hit = s[:, -1] > y
    first = np.argmax(s > y, axis=1)
    rows = np.arange(paths)
    prev_t = np.where(first > 0, t_points[first - 1], 0.0)
    prev_v = np.where(first > 0, s[rows, first - 1], 0.0)
    cur_v = s[rows, first]
    tau = prev_t + (y - prev_v) / np.where(hit, cur_v - prev_v, 1.0) * (t_points[first] - prev_t)
    # paths still below y at the horizon contribute at most e^{-Re(z) horizon}
    vals = np.where(hit, np.exp(-z * tau) / z, 0.0)
    mean = vals.mean()
    return mean, math.sqrt(np.mean(np.abs(vals - mean) ** 2) / paths)


@pytest.mark.parametrize("z", [1.0, 1 + 2j])
def test_transform_against_monte_carlo_quadrature(z):
    p = GbmParams(0.0, 1.0)
    mc, se = _laplace_of_ccdf_mc(p, 1.0, z)
    ref = ccdf_transform(p, 1.0, z).value
    assert abs(mc - ref) <= 3 * se + 2e-3


@pytest.fixture(scope="module")
def big_sample():
    cfg = McConfig(paths=1_000_000, steps_per_unit_time=1000, horizon=1.0, seed=2026)
    return simulate_integrals(GbmParams(0.0, 1.0), cfg, [1.0])[:, 0]


@pytest.mark.slow
def test_inverted_cdf_against_monte_carlo(big_sample):
    e = empirical_cdf(big_sample, 1.0)
    for method in ("gaver_stehfest", "talbot"):
        f = cdf_at(GbmParams(0.0, 1.0), 1.0, 1.0, InversionConfig(method)).value
        assert abs(f - e.value) <= 3 * e.std_error + 0.003


@pytest.mark.slow
def test_inverted_density_against_kde(big_sample):
    e = empirical_pdf(big_sample, 1.0)
    f = pdf_at(GbmParams(0.0, 1.0), 1.0, 1.0, InversionConfig("talbot")).value
    assert e.bandwidth > 0
    assert abs(f - e.value) <= 3 * e.std_error
