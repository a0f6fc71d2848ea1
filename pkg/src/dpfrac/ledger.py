"""Proven facts about one graph and the interval they imply for chi*_DP."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

from filelock import FileLock

from .errors import IntegrityError, InvalidParameter, MalformedInput

DP_COLORABLE = "dp-colorable"
NOT_DP_COLORABLE = "not-dp-colorable"
UPPER = "upper"
LOWER = "lower"
KINDS = (DP_COLORABLE, NOT_DP_COLORABLE, UPPER, LOWER)


def rational_json(q: Fraction) -> dict:
    return {"num": str(q.numerator), "den": str(q.denominator)}


def rational_from_json(d) -> Fraction:
    return Fraction(int(d["num"]), int(d["den"]))


def format_rational(q: Optional[Fraction]) -> str:
    """Exact decimal when the denominator is 2^i 5^j, otherwise ``p/q``."""
    if q is None:
        return "inf"
    den = q.denominator
    digits = 0
    while den % 2 == 0 or den % 5 == 0:
        if den % 10 == 0:
            den //= 10
        elif den % 2 == 0:
            den //= 2
        else:
            den //= 5
        digits += 1
    if den != 1:
        return f"{q.numerator}/{q.denominator}"
    scaled = q * 10**digits
    s = str(abs(scaled.numerator)).rjust(digits + 1, "0")
    sign = "-" if q < 0 else ""
    if digits == 0:
        return sign + s
    return (sign + s[:-digits] + "." + s[-digits:]).rstrip("0").rstrip(".")


@dataclass(frozen=True)
class Fact:
    kind: str
    provenance: str
    value: Optional[Fraction] = None  # bound value for upper/lower facts
    a: Optional[int] = None
    b: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParameter(f"unknown fact kind {self.kind!r}")
        if not self.provenance:
            raise InvalidParameter("every fact needs a provenance")
        if self.kind in (DP_COLORABLE, NOT_DP_COLORABLE):
            if self.a is None or self.b is None or not 1 <= self.b <= self.a:
                raise InvalidParameter("colorability facts need a >= b >= 1")
        elif self.value is None:
            raise InvalidParameter("bound facts need a value")

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.a, self.b) if self.a is not None else self.value

    def to_json(self) -> dict:
        out = {"kind": self.kind, "provenance": self.provenance}
        if self.value is not None:
            out["value"] = rational_json(self.value)
        if self.a is not None:
            out["a"], out["b"] = self.a, self.b
        return out

    @classmethod
    def from_json(cls, d) -> "Fact":
        value = rational_from_json(d["value"]) if d.get("value") is not None else None
        return cls(d["kind"], d["provenance"], value, d.get("a"), d.get("b"))


@dataclass(frozen=True)
class BoundsLedger:
    graph_key: str
    facts: tuple[Fact, ...] = ()

    def interval(self) -> tuple[Fraction, Optional[Fraction]]:
        """``(lo, hi)``; ``hi`` is None while no upper bound is known.

        Refutations never raise ``lo``: failing to be (a,b)-DP-colorable says
        nothing about other ratios. They only take part in consistency checks.
        """
        lo = max([f.value for f in self.facts if f.kind == LOWER], default=Fraction(1))
        uppers = [f.ratio for f in self.facts if f.kind in (UPPER, DP_COLORABLE)]
        return lo, (min(uppers) if uppers else None)

    def _best(self, kinds, pick):
        cands = [f for f in self.facts if f.kind in kinds]
        return pick(cands, key=lambda f: f.ratio) if cands else None

    def check(self) -> None:
        lo_fact = self._best((LOWER,), max)
        hi_fact = self._best((UPPER, DP_COLORABLE), min)
        if lo_fact and hi_fact and lo_fact.ratio > hi_fact.ratio:
            raise IntegrityError(
                f"lower bound {format_rational(lo_fact.ratio)} [{lo_fact.provenance}] exceeds "
                f"upper bound {format_rational(hi_fact.ratio)} [{hi_fact.provenance}]")
        # (a,b)-DP-colorable implies (a',b')-DP-colorable for a' >= a, b' <= b
        for yes in self.facts:
            if yes.kind != DP_COLORABLE:
                continue
            for no in self.facts:
                if no.kind == NOT_DP_COLORABLE and no.a >= yes.a and no.b <= yes.b:
                    raise IntegrityError(
                        f"({yes.a},{yes.b}) colorable [{yes.provenance}] but "
                        f"({no.a},{no.b}) refuted [{no.provenance}]")

    def to_json(self) -> dict:
        lo, hi = self.interval()
        return {
            "graph": self.graph_key,
            "facts": [f.to_json() for f in self.facts],
            "interval": {"lo": rational_json(lo), "hi": None if hi is None else rational_json(hi)},
        }


def ledger_update(ledger: BoundsLedger, fact: Fact) -> BoundsLedger:
    """Add ``fact`` (ignored if already present) and re-check consistency."""
    if fact in ledger.facts:
        return ledger
    new = BoundsLedger(ledger.graph_key, ledger.facts + (fact,))
    new.check()
    return new


class LedgerStore:
    """JSON file holding one :class:`BoundsLedger` per graph key.

    Updates take a file lock, so concurrent CLI runs serialize.
    """

    def __init__(self, path):
        self.path = Path(path)
        self._lock = FileLock(str(self.path) + ".lock")

    def _read(self) -> dict:
        if not self.path.exists():
            return {"version": 1, "graphs": {}}
        try:
            data = json.loads(self.path.read_text())
        except json.JSONDecodeError as exc:
            raise MalformedInput(f"ledger is not valid JSON ({exc.msg})") from exc
        if not isinstance(data, dict) or not isinstance(data.get("graphs"), dict):
            raise MalformedInput("expected object with a 'graphs' map", "$.graphs")
        return data

    def load(self, key: str) -> BoundsLedger:
        with self._lock:
            entry = self._read()["graphs"].get(key, {"facts": []})
        return BoundsLedger(key, tuple(Fact.from_json(f) for f in entry["facts"]))

    def keys(self) -> list[str]:
        with self._lock:
            return sorted(self._read()["graphs"])

    def add(self, key: str, fact: Fact) -> BoundsLedger:
        with self._lock:
            data = self._read()
            entry = data["graphs"].get(key, {"facts": []})
            ledger = BoundsLedger(key, tuple(Fact.from_json(f) for f in entry["facts"]))
            ledger = ledger_update(ledger, fact)
            data["graphs"][key] = {"facts": [f.to_json() for f in ledger.facts]}
            self.path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
        return ledger
