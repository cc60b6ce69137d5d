import mpmath as mp
import pytest

from gbm_exfun import GbmParams

PARAM_SETS = [(0.0, 1.0), (1.0, 1.0), (-0.5, 0.8)]

# P(y, lam), -dP/dy at (mu, sigma, y, lam); mpmath hyp1f1 at 40 digits
FROZEN_TRANSFORMS = [
    ((0.0, 1.0, 1.0, 1.0), 0.3595448423641345178, 0.30493599139724858598),
    ((1.0, 1.0, 0.5, 2.0), 0.12733075109277282794, 0.3777918722373807499),
    ((-0.5, 0.8, 2.0, 0.5), 0.97462214259431063397, 0.23338917114675384177),
    ((0.0, 1.0, 1.0, 1 + 2j), -0.11556830110604667439 - 0.052636115747099284021j,
     -0.077978182301013622265 - 0.17245698095777932807j),
]

# F(t, y), p_t(y) at (mu, sigma, t, y); mpmath Talbot inversion of the above at 40 digits
FROZEN_LAW = [
    ((0.0, 1.0, 1.0, 1.0), 0.46576327154480523, 0.69390719118003026),
    ((0.0, 1.0, 2.0, 1.0), 0.14669017603122883, 0.3342765125376711),
    ((0.0, 1.0, 1.0, 2.0), 0.85350230114918127, 0.17786636295082296),
    ((1.0, 1.0, 1.0, 1.0), 0.77904184797470771, 0.53183433189601971),
    ((1.0, 1.0, 2.0, 1.0), 0.53476070898672521, 0.6143074256479657),
    ((1.0, 1.0, 1.0, 2.0), 0.97342770723917642, 0.048697209111912666),
    ((-0.5, 0.8, 1.0, 1.0), 0.27061561328105602, 0.71170896022631325),
    ((-0.5, 0.8, 2.0, 1.0), 0.023163245154064749, 0.09659202380540105),
    ((-0.5, 0.8, 1.0, 2.0), 0.78562988284325291, 0.27899381627048003),
]


def mp_ccdf(mu, sigma, y, lam, dps=30):
    """Independent reference for P(y, lam) through mpmath's hyp1f1."""
    with mp.workdps(dps):
        mu, sigma, y, lam = (mp.mpmathify(v) for v in (mu, sigma, y, lam))
        s2 = sigma * sigma
        k = (mu + mp.sqrt(mu * mu + 2 * lam * s2)) / s2
        beta = 1 - 2 * mu / s2 + 2 * k
        x = 2 / (y * s2)
        return complex(x ** k * mp.gamma(beta - k) / mp.gamma(beta) * mp.hyp1f1(k, beta, -x) / lam)


def mp_series(a, b, z, dps=60):
    """Plain Kummer series summed at high precision (no library hypergeometric)."""
    with mp.workdps(dps):
        a, b, z = mp.mpc(a), mp.mpc(b), mp.mpc(z)
        term = mp.mpc(1)
        total = mp.mpc(1)
        n = 0
        while True:
            term *= (a + n) / ((b + n) * (n + 1)) * z
            n += 1
            total += term
            if n > abs(z) and abs(term) < mp.mpf(10) ** (-dps + 15) * abs(total):
                return complex(total)


@pytest.fixture(params=PARAM_SETS, ids=lambda p: f"mu={p[0]},sigma={p[1]}")
def params(request):
    return GbmParams(*request.param)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
