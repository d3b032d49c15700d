from fractions import Fraction

import pytest

from dyndense._rational import as_fraction, ceil_log2, duplication_factor, fmt_rational, sqrt_upper


@pytest.mark.parametrize("x,k", [(1, 0), (2, 1), (3, 2), (6, 3), (8, 3), (Fraction(1, 2), -1), (Fraction(3, 8), -1)])
def test_ceil_log2(x, k):
    assert ceil_log2(Fraction(x)) == k


def test_ceil_log2_rejects_nonpositive():
    with pytest.raises(ValueError):
        ceil_log2(Fraction(0))


@pytest.mark.parametrize(
    "nw,eps,alpha",
    [(3, Fraction(1, 2), 406), (8, Fraction(3, 10), 2134), (1, Fraction(1, 2), 1)],
)
def test_duplication_factor(nw, eps, alpha):
    assert duplication_factor(Fraction(nw), eps) == alpha


def test_sqrt_upper():
    for x in (Fraction(2), Fraction(9, 4), Fraction(1, 3)):
        r = sqrt_upper(x)
        assert r * r >= x
        assert float(r) == pytest.approx(float(x) ** 0.5, rel=1e-12)
    assert sqrt_upper(Fraction(9, 4)) >= Fraction(3, 2)


def test_formatting_and_coercion():
    assert fmt_rational(Fraction(1, 3)) == "1/3"
    assert fmt_rational(Fraction(4)) == "4/1"
    assert as_fraction("3/2") == Fraction(3, 2)
    assert as_fraction("0.3") == Fraction(3, 10)
    with pytest.raises(TypeError):
        as_fraction(0.3)
