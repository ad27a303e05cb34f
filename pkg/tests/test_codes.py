import numpy as np
import pytest
from fractions import Fraction

from dsmimo.codes import OstbcCode, alamouti, code_by_name, g4, ostbc_rate

from conftest import cgauss


@pytest.mark.parametrize("n_t,rate", [
    (1, Fraction(1)),
    (2, Fraction(1)),
    (3, Fraction(3, 4)),
    (4, Fraction(3, 4)),
    (5, Fraction(1, 2)),
    (8, Fraction(1, 2)),
    (16, Fraction(5, 16)),
])
def test_maximal_rate_formula(n_t, rate):
    assert ostbc_rate(n_t) == rate


def test_shipped_code_dimensions():
    a, g = alamouti(), g4()
    assert (a.n_t, a.n_c, a.n_symbols, a.rate) == (2, 2, 2, Fraction(1))
    assert (g.n_t, g.n_c, g.n_symbols, g.rate) == (4, 4, 3, Fraction(3, 4))
    assert a.rate == ostbc_rate(2)
    assert g.rate == ostbc_rate(4)


def test_alamouti_matrix_layout():
    x = np.array([1 + 2j, -3 + 0.5j])
    m = alamouti().build(x)
    np.testing.assert_array_equal(m[0], x)
    np.testing.assert_array_equal(m[1], [-x[1].conj(), x[0].conj()])


@pytest.mark.parametrize("code", [alamouti(), g4()])
def test_orthogonality_on_random_symbols(code, rng):
    # G^H G = ||x||^2 I for 1000 random draws
    worst = 0.0
    for _ in range(1000):
        x = cgauss(rng, code.n_symbols) * rng.uniform(0.1, 10)
        worst = max(worst, code.orthogonality_defect(x))
    assert worst < 1e-12


def test_rate_only_code():
    c = OstbcCode.rate_only(8)
    assert c.rate == Fraction(1, 2)
    with pytest.raises(ValueError):
        c.build(np.ones(5))


def test_code_by_name():
    assert code_by_name("alamouti").n_t == 2
    assert code_by_name("g4").n_t == 4
    with pytest.raises(ValueError):
        code_by_name("g8")


def test_bad_generator_rejected():
    with pytest.raises(ValueError):
        OstbcCode("bad", 1, 1, 1, (("y1",),))
