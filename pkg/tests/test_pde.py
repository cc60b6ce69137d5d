import io

import numpy as np
import pytest
import sympy as sp

from gbm_exfun import GbmParams, InversionConfig, cdf_at, ccdf_transform, ode_residual, pde_residual
from gbm_exfun.pde import write_residual_csv

Y = np.geomspace(0.1, 10, 50)


def test_ode_closed_form_is_a_solution(params):
    for lam in (0.1, 1.0, 10.0):
        rep = ode_residual(params, lam, Y)
        assert rep.norm_rel <= 1e-5
        assert all(h > 0 for h in rep.step_sizes)


def test_ode_rejects_non_solutions():
    p = GbmParams(0.0, 1.0)
    perturbed = ode_residual(p, 1.0, Y, P=lambda y: ccdf_transform(p, y, 1.0).real * (1 + 0.01 * y))
    assert perturbed.norm_rel >= 1e-3
    constant = ode_residual(p, 1.0, Y, P=lambda y: 1.0)
    assert constant.norm_rel == pytest.approx(1.0, abs=1e-6)


def test_ode_residual_is_truncation_dominated():
    # five-point stencils: error ~ h^4 until the roundoff floor
    p = GbmParams(0.0, 1.0)
    norms = [ode_residual(p, 1.0, Y, rel_step=h).norm_rel for h in (0.08, 0.04, 0.02)]
    assert norms[0] / norms[1] > 8
    assert norms[1] / norms[2] > 8


def test_pde_inverted_cdf_talbot():
    p = GbmParams(0.0, 1.0)
    rep = pde_residual(p, np.linspace(0.5, 2, 4), np.geomspace(0.2, 5, 8), cfg=InversionConfig("talbot"))
    assert rep.norm_rel <= max(1e-3, 10 * rep.inversion_error)
    assert rep.norm_rel <= 1e-5


def test_pde_inverted_cdf_stehfest():
    p = GbmParams(0.0, 1.0)
    rep = pde_residual(p, np.linspace(0.5, 2, 4), np.geomspace(0.2, 5, 8))
    assert rep.inversion_error > 0
    assert rep.norm_rel <= max(1e-3, 10 * rep.inversion_error)


def test_pde_rejects_wrong_solution():
    p = GbmParams(0.0, 1.0)
    cfg = InversionConfig("talbot")
    # the law for a different drift does not solve this equation
    q = GbmParams(0.4, 1.0)
    rep = pde_residual(p, [0.5, 1.0, 2.0], [0.3, 1.0, 3.0], F=lambda t, y: cdf_at(q, t, y, cfg))
    assert rep.norm_rel >= 1e-2


def test_divergence_and_expanded_forms_agree():
    p = GbmParams(-0.5, 0.8)
    cfg = InversionConfig("talbot")
    table = {}

    def F(t, y):
        key = (t, y)
        if key not in table:
            table[key] = cdf_at(p, t, y, cfg)
        return table[key]

    a = pde_residual(p, [0.5, 1.0], [0.3, 1.0, 3.0], F=F, form="divergence")
    b = pde_residual(p, [0.5, 1.0], [0.3, 1.0, 3.0], F=F, form="expanded")
    assert np.max(np.abs(a.residuals - b.residuals)) <= 1e-12 * np.max(a.term_scale)


def test_forms_are_symbolically_equal():
    y, mu, sigma = sp.symbols("y mu sigma", positive=True)
    F = sp.Function("F")(y)
    a = sigma ** 2 / 2 - mu
    b = mu + sigma ** 2 / 2
    divergence = sigma ** 2 / 2 * sp.diff(y ** 2 * sp.diff(F, y), y) - (a * y + 1) * sp.diff(F, y)
    expanded = sigma ** 2 / 2 * y ** 2 * sp.diff(F, y, 2) + (b * y - 1) * sp.diff(F, y)
    assert sp.simplify(divergence - expanded) == 0


def test_boundary_behaviour():
    p = GbmParams(0.0, 1.0)
    cfg = InversionConfig("talbot")
    for t in (0.5, 1.0, 2.0):
        assert cdf_at(p, t, 1e-3, cfg).value <= 1e-4
        y = 1.0
        while cdf_at(p, t, y, cfg).value < 1 - 1e-3:
            y *= 2
            assert y < 1e6
        assert cdf_at(p, t, y, cfg).value == pytest.approx(1.0, abs=1e-3)


def test_stencil_domain_checked():
    p = GbmParams(0.0, 1.0)
    with pytest.raises(ValueError):
        ode_residual(p, 1.0, [0.0, 1.0])
    with pytest.raises(ValueError):
        pde_residual(p, [0.01], [1.0], rel_step_t=0.6)
    with pytest.raises(ValueError):
        pde_residual(p, [1.0], [1.0], form="weak")


def test_residual_csv():
    rep = ode_residual(GbmParams(0.0, 1.0), 1.0, [0.5, 2.0])
    buf = io.StringIO()
    write_residual_csv(buf, rep)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "coord1,coord2,residual,term_scale"
    assert len(lines) == 3
    assert [float(v) for v in lines[1].split(",")] == [0.5, 1.0, rep.residuals[0], rep.term_scale[0]]
