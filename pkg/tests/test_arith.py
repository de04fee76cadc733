from fractions import Fraction

import pytest

from besseweyl.arith import (
    Weights,
    is_admissible,
    length_spectrum,
    rational_fit,
    seifert_quotient_order,
    spindle_from_finsler,
)


@pytest.mark.parametrize("w,ok", [((3, 1), True), ((2, 1), False), ((6, 2), False), ((4, 2), True),
                                   ((1, 1), True), ((2, 2), False)])
def test_admissible(w, ok):
    assert is_admissible(Weights(*w)) is ok


def test_weights_validation():
    with pytest.raises(ValueError):
        Weights(1, 3)
    assert Weights.parse("5,3") == Weights(5, 3)


def test_seifert_orders():
    assert seifert_quotient_order(1, Weights(7, 5)) == 1
    assert seifert_quotient_order(4, Weights(3, 1)) == 2
    assert seifert_quotient_order(2, Weights(5, 3)) == 1
    for k in range(1, 400):
        for w in (Weights(9, 1), Weights(11, 5), Weights(100, 2)):
            assert k % seifert_quotient_order(k, w) == 0


def test_spindle_from_finsler():
    assert spindle_from_finsler(1, 1) == Weights(1, 1)
    assert spindle_from_finsler(2, 3) == Weights(3, 1)
    assert spindle_from_finsler(5, 9) == Weights(9, 1)
    with pytest.raises(ValueError):
        spindle_from_finsler(1, 2)


def test_spectra():
    s = length_spectrum(Weights(1, 1))
    assert {l.pi_multiple for l in s.lengths} == {Fraction(2)}
    s = length_spectrum(Weights(3, 1))
    assert [str(l) for l in s.lengths] == ["4pi/3", "4pi"]
    s = length_spectrum(Weights(5, 3))
    assert [str(l) for l in s.lengths] == ["8pi/5", "8pi/3", "8pi"]
    with pytest.raises(ValueError):
        length_spectrum(Weights(4, 2))


def test_round_trip_all_coprime():
    for a1 in range(1, 40):
        for a2 in range(1, a1 + 1):
            w = Weights(a1, a2)
            if is_admissible(w) and w.c == 1:
                s = length_spectrum(w)
                assert spindle_from_finsler(s.p, s.q) == w


def test_rational_fit():
    assert rational_fit(0.6666666666667) == Fraction(2, 3)
