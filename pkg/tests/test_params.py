import pytest

from morreyheat.params import make_params


def test_n3_p7():
    p = make_params(3, 7)
    assert p.p_s == 5.0
    assert p.supercritical


def test_n5_p3_derived_quantities():
    p = make_params(5, 3)
    assert p.beta == 0.5
    assert p.mu == 2.0
    assert p.q_c == 5.0
    assert p.supercritical          # p_S = 7/3 < 3


def test_critical_boundary_not_supercritical():
    p = make_params(3, 5)           # p == p_S exactly
    assert not p.supercritical


def test_identities_hold_on_a_sweep():
    for n in range(3, 13):
        for pexp in (1.5, 2.0, 3.0, 7.0):
            mp = make_params(n, pexp)
            assert mp.p_s == (n + 2) / (n - 2)
            assert mp.beta * (mp.p - 1) == pytest.approx(1.0, rel=1e-15)
            assert mp.mu == pytest.approx(4 * mp.beta, rel=1e-15)
            assert mp.q_c == pytest.approx(n / (2 * mp.beta), rel=1e-15)


def test_p_s_strictly_decreasing_in_n():
    vals = [make_params(n, 2.0).p_s for n in range(3, 13)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("n,p", [(2, 3.0), (0, 2.0), (3, 1.0), (3, 0.5), (4.5, 2.0)])
def test_rejects_bad_arguments(n, p):
    with pytest.raises(ValueError):
        make_params(n, p)
