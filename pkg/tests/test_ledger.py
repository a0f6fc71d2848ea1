from fractions import Fraction

import pytest

from dpfrac.errors import IntegrityError, InvalidParameter, MalformedInput
from dpfrac.ledger import (
    DP_COLORABLE,
    LOWER,
    NOT_DP_COLORABLE,
    UPPER,
    BoundsLedger,
    Fact,
    LedgerStore,
    format_rational,
    ledger_update,
    rational_from_json,
    rational_json,
)


def test_empty_ledger():
    assert BoundsLedger("cycle:5").interval() == (1, None)


def test_k23_interval():
    led = BoundsLedger("kbip:2,3")
    led = ledger_update(led, Fact(DP_COLORABLE, "exhaustive", a=5, b=2))
    assert led.interval() == (1, Fraction(5, 2))
    led = ledger_update(led, Fact(LOWER, "analytic", value=Fraction("2.025")))
    assert led.interval() == (Fraction("2.025"), Fraction(5, 2))
    assert ledger_update(led, Fact(LOWER, "analytic", value=Fraction("2.025"))) is led


def test_contradictions_raise():
    led = BoundsLedger("g", (Fact(UPPER, "u", value=Fraction(5, 2)),))
    with pytest.raises(IntegrityError):
        ledger_update(led, Fact(LOWER, "l", value=Fraction(3)))
    led = BoundsLedger("g", (Fact(DP_COLORABLE, "yes", a=5, b=2),))
    with pytest.raises(IntegrityError):
        ledger_update(led, Fact(NOT_DP_COLORABLE, "no", a=6, b=2))
    # a refutation at a smaller ratio is consistent
    ledger_update(led, Fact(NOT_DP_COLORABLE, "no", a=4, b=2))


def test_fact_validation():
    with pytest.raises(InvalidParameter):
        Fact("maybe", "x")
    with pytest.raises(InvalidParameter):
        Fact(UPPER, "")
    with pytest.raises(InvalidParameter):
        Fact(DP_COLORABLE, "x", a=2, b=3)


def test_formatting():
    values = [Fraction(5, 2), Fraction(14, 5), Fraction("2.025"), Fraction("2.0959"), Fraction(10, 3), Fraction(2),
              Fraction(-3, 4)]
    assert [format_rational(v) for v in values] == ["2.5", "2.8", "2.025", "2.0959", "10/3", "2", "-0.75"]
    assert format_rational(None) == "inf"
    assert rational_from_json(rational_json(Fraction(-7, 3))) == Fraction(-7, 3)


def test_store_round_trip(tmp_path):
    store = LedgerStore(tmp_path / "l.json")
    store.add("kbip:2,3", Fact(UPPER, "u", value=Fraction(5, 2)))
    store.add("kbip:2,3", Fact(LOWER, "l", value=Fraction("2.025")))
    store.add("cycle:5", Fact(DP_COLORABLE, "d", a=5, b=2))
    again = LedgerStore(tmp_path / "l.json")
    assert again.keys() == ["cycle:5", "kbip:2,3"]
    assert again.load("kbip:2,3").interval() == (Fraction("2.025"), Fraction(5, 2))
    (tmp_path / "bad.json").write_text("{")
    with pytest.raises(MalformedInput):
        LedgerStore(tmp_path / "bad.json").keys()
