import math

import numpy as np
import pytest

from gaplis.limits import (
    TracyWidomTable,
    f_closed_halfplane,
    f_closed_symmetric,
    f_gap_limit,
    f_gap_limit_branchy,
    f_limit,
    g_closed_h0,
    g_closed_nondecreasing,
    g_closed_symmetric,
    g_closed_unit,
    g_gap_limit,
    g_limit,
    regime_limit,
    report_sandwich,
    sigma_closed_symmetric,
    sigma_gap_continuous,
    sigma_gap_discrete,
    sigma_johansson,
    solve_alpha_beta,
)


def _normal_cdf_table(lo=-8.0, hi=8.0, n=400):
    xs = np.linspace(lo, hi, n)
    fs = 0.5 * (1 + np.vectorize(math.erf)(xs / math.sqrt(2)))
    return TracyWidomTable(xs, fs)


def test_f_limit():
    assert f_limit(1, 1) == 2.0
    assert f_limit(4, 1) == 4.0
    assert f_limit(2, 3) == f_limit(3, 2)
    with pytest.raises(ValueError):
        f_limit(0, 1)


def test_f_gap_limit_values():
    assert abs(f_gap_limit(1, 1, (1, 1)) - 2 / 3) < 1e-15
    assert abs(f_gap_limit(1, 1, (1, 0)) - (2 * math.sqrt(2) - 2)) < 1e-14
    assert f_gap_limit(1, 1, (0.5, 0.5)) == 1.0
    assert f_gap_limit(1, 1, (0, 0)) == f_limit(1, 1)


def test_f_gap_limit_matches_branchy_form():
    for a, b in [(1, 1), (2, 1), (0.7, 1.9)]:
        for h in [(0, 0), (1, 1), (2, 0.3), (0.5, 0.5), (0.25, 1.0)]:
            assert abs(f_gap_limit(a, b, h) - f_gap_limit_branchy(a, b, h)) < 1e-12


def test_f_gap_limit_special_cases():
    for h in (0.3, 1.0, 2.5):
        assert abs(f_gap_limit(1, 1, (h, h)) - f_closed_symmetric(h)) < 1e-14
        assert abs(f_gap_limit(1, 1, (h, 0)) - f_closed_halfplane(h)) < 1e-14


def test_f_gap_continuity_across_critical_curve():
    # h1 h2 = 1/4 is a removable seam of the two-branch form
    for h1 in (0.1, 0.5, 2.0):
        h2 = 0.25 / h1
        lo = f_gap_limit(1, 1.3, (h1, h2 - 1e-6))
        mid = f_gap_limit(1, 1.3, (h1, h2))
        hi = f_gap_limit(1, 1.3, (h1, h2 + 1e-6))
        assert abs(lo - mid) < 1e-4 and abs(hi - mid) < 1e-4


def test_sigma_continuous():
    assert abs(sigma_gap_continuous(1, 1, (0, 0)).scale - 1.0) < 1e-15
    assert abs(sigma_gap_continuous(1, 1, (1, 1)).scale - 3 ** (-4 / 3)) < 1e-15
    assert abs(sigma_gap_continuous(1, 1, (2, 2)).scale - 5 ** (-4 / 3)) < 1e-15
    fs = sigma_gap_continuous(2, 0.5, (0.7, 0.1))
    assert fs.scale > 0 and fs.exponent == pytest.approx(1 / 3)


def test_g_limit():
    assert abs(g_limit(1, 1, 0.25) - 2.0) < 1e-15
    assert g_limit(2, 3, 0.3) == pytest.approx(g_limit(3, 2, 0.3))
    for c in (3.0, 8.0):
        assert g_limit(c * 1, c * 2, 0.4) == pytest.approx(c * g_limit(1, 2, 0.4))
    assert g_limit(0.0, 2.0, 0.5) == pytest.approx(2.0 * 0.5 / 0.5)
    with pytest.raises(ValueError):
        g_limit(1, 1, 1.5)


def test_g_gap_limit_interior_values():
    res = g_gap_limit(1, 1, (1, 1), 0.25)
    assert res.branch == "interior"
    assert abs(res.value - 2 / 3) < 1e-12
    assert res.residual <= 1e-10
    res = g_gap_limit(1, 1, (1, 0), 0.25)
    assert abs(res.value - 2 * math.sqrt(0.25 * 0.75)) < 1e-12
    res = g_gap_limit(1, 1, (1, 1), 0.5)
    assert abs(res.value - 2 * math.sqrt(0.5) / (1 + math.sqrt(0.5))) < 1e-12


def test_g_gap_limit_flat_edges():
    res = g_gap_limit(1, 10, (1, 1), 0.5)
    assert res.branch == "flat_edge_a" and res.value == 1.0
    res = g_gap_limit(10, 1, (1, 1), 0.5)
    assert res.branch == "flat_edge_b" and res.value == 1.0
    # exact threshold ties are flat-edge values tagged as critical
    p = 0.5
    lo = 1 / ((1 - 1) + 1 / p)
    res = g_gap_limit(lo, 1.0, (1, 1), p)
    assert res.branch == "critical" and res.value == pytest.approx(lo / 1)


def test_g_gap_limit_closed_forms_against_bisection():
    ps = (0.12, 0.25, 0.5, 0.71)
    for p in ps:
        for a, b in [(1, 1), (1.3, 0.6), (2, 5)]:
            if p < min(a / b, b / a):
                assert abs(g_gap_limit(a, b, (1, 1), p).value - g_closed_unit(a, b, p)) < 1e-10
            if p < a / (a + b):
                assert (
                    abs(g_gap_limit(a, b, (1, 0), p).value - g_closed_nondecreasing(a, b, p))
                    < 1e-10
                )
        for h in (1, 2, 3):
            if p < 1 / (h + 1):
                assert abs(g_gap_limit(1, 1, (h, 0), p).value - g_closed_h0(h, p)) < 1e-10
            assert abs(g_gap_limit(1, 1, (h, h), p).value - g_closed_symmetric(h, p)) < 1e-10


def test_g_gap_branch_continuity():
    for h1, h2, p in [(2, 1, 0.3), (1, 1, 0.5), (3, 2, 0.2)]:
        lo = h1 / ((h2 - 1) + 1 / p)
        v_in = g_gap_limit(lo * (1 + 1e-6), 1.0, (h1, h2), p).value
        v_out = g_gap_limit(lo * (1 - 1e-6), 1.0, (h1, h2), p).value
        assert abs(v_in - v_out) < 1e-4


def test_alpha_beta():
    ab = solve_alpha_beta(1, 1, (1, 1), 0.25)
    assert abs(ab.alpha - 1 / 3) < 1e-10 and abs(ab.beta - 1 / 3) < 1e-10
    assert ab.residual <= 1e-10
    assert g_limit(ab.alpha, ab.beta, 0.25) == pytest.approx(
        g_gap_limit(1, 1, (1, 1), 0.25).value, abs=1e-10
    )
    # transposed directions swap the roles
    ab1 = solve_alpha_beta(1.4, 0.9, (2, 1), 0.3)
    ab2 = solve_alpha_beta(0.9, 1.4, (1, 2), 0.3)
    assert ab1.alpha == pytest.approx(ab2.beta) and ab1.beta == pytest.approx(ab2.alpha)
    with pytest.raises(ValueError, match="flat edge"):
        solve_alpha_beta(1, 10, (1, 1), 0.5)


def test_sigma_johansson():
    v = sigma_johansson(1, 1, 0.25)
    assert v == pytest.approx(2 ** (-1 / 3) * (4 / 3) * 1.5 ** (4 / 3))
    assert abs(v - 1.8171) < 1e-3
    assert sigma_johansson(2, 3, 0.3) == pytest.approx(sigma_johansson(3, 2, 0.3))
    assert sigma_johansson(8, 8, 0.3) == pytest.approx(2 * sigma_johansson(1, 1, 0.3))


def test_sigma_gap_discrete_matches_special_case():
    for p in (0.25, 0.5):
        for h in (1, 2, 3):
            fs = sigma_gap_discrete(1, 1, (h, h), p)
            assert abs(fs.scale - sigma_closed_symmetric(h, p)) < 1e-12
            assert fs.center == pytest.approx(g_closed_symmetric(h, p))
    with pytest.raises(ValueError, match="critical direction"):
        sigma_gap_discrete(1, 2, (1, 1), 0.25)
    # critical direction with non-unit gaps: a/h1 = b/h2
    fs = sigma_gap_discrete(2, 1, (2, 1), 0.25)
    assert fs.scale > 0


def test_sandwich_bounds():
    table = _normal_cdf_table()
    # off the critical ray the bounds straddle; on it they collapse
    lo, hi = report_sandwich(1, 2, (1, 1), 0.25, 1.0, table)
    assert lo <= hi
    lo0, hi0 = report_sandwich(1, 1, (1, 1), 0.25, 0.7, table)
    assert lo0 == pytest.approx(hi0)
    ln, hn = report_sandwich(1, 2, (1, 1), 0.25, -1.0, table)
    assert ln <= hn
    assert report_sandwich(1, 2, (1, 1), 0.25, math.inf, table) == (1.0, 1.0)
    with pytest.raises(ValueError, match="table"):
        report_sandwich(1, 2, (1, 1), 0.25, 1.0, None)
    # transposed direction agrees with swapping the inputs
    a = report_sandwich(1.2, 1, (1, 2), 0.3, 0.8, table)
    b = report_sandwich(1, 1.2, (2, 1), 0.3, 0.8, table)
    assert a == pytest.approx(b)


def test_tracy_widom_table_validation():
    with pytest.raises(ValueError, match="strictly increasing"):
        TracyWidomTable([0, 0, 1], [0, 0.5, 1])
    with pytest.raises(ValueError, match="CDF"):
        TracyWidomTable([0, 1, 2], [0.9, 0.5, 1])
    t = _normal_cdf_table()
    assert t.cdf(0.0) == pytest.approx(0.5, abs=1e-3)
    assert t.cdf(-99) == pytest.approx(0.0, abs=1e-9)


def test_tracy_widom_table_csv(tmp_path):
    path = tmp_path / "tw.csv"
    path.write_text("x,F\n-1.0,0.1\n0.0,0.6\n1.0,0.9\n")
    t = TracyWidomTable.from_csv(path)
    assert t.cdf(0.5) == pytest.approx(0.75)
    bad = tmp_path / "bad.csv"
    bad.write_text("u,v\n1,2\n")
    with pytest.raises(ValueError, match="header"):
        TracyWidomTable.from_csv(bad)


def test_regime_limits():
    tag, v = regime_limit(0.0, 1, 1)
    assert tag == "sqrt_lambda_t" and v == 2.0
    tag, v = regime_limit(1.0, 1, 1)
    assert tag == "sqrt_lambda_t" and v == pytest.approx(2 / 3)
    tag, v = regime_limit(math.inf, 2, 3)
    assert tag == "t_over_h" and v == 2
    with pytest.raises(ValueError):
        regime_limit(-1.0, 1, 1)


def test_interior_fixed_point_with_zero_gaps_formally():
    # substituting zero gaps formally must return the ungapped limit
    res = g_gap_limit(1, 1, (1, 1), 0.25)
    lam = res.value
    assert abs(lam - g_limit(1 - lam, 1 - lam, 0.25)) <= 1e-10
