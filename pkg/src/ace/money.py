"""Fixed-point money: integer minor units, two decimal places.

Expense-sheet arithmetic has to be exact, so amounts never pass through
floats: addition and integer scaling stay in minor units, and fractional
factors (credit interest) round half-even once, at the end.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal

_AMOUNT = re.compile(r"^-?\d+(\.\d{1,2})?$")


class MoneyError(ValueError):
    pass


@dataclass(frozen=True)
class Money:
    minor: int
    currency: str = "USD"

    @classmethod
    def parse(cls, text: str, currency: str = "USD") -> "Money":
        text = str(text).strip()
        if not _AMOUNT.match(text):
            raise MoneyError("bad money amount %r" % text)
        negative = text.startswith("-")
        if negative:
            text = text[1:]
        if "." in text:
            units, frac = text.split(".")
            frac = (frac + "00")[:2]
        else:
            units, frac = text, "00"
        minor = int(units) * 100 + int(frac)
        return cls(-minor if negative else minor, currency)

    @classmethod
    def zero(cls, currency: str = "USD") -> "Money":
        return cls(0, currency)

    def _check(self, other: "Money") -> None:
        if self.currency != other.currency:
            raise MoneyError(
                "mixed currencies: %s and %s" % (self.currency, other.currency)
            )

    def __add__(self, other: "Money") -> "Money":
        self._check(other)
        return Money(self.minor + other.minor, self.currency)

    def __sub__(self, other: "Money") -> "Money":
        self._check(other)
        return Money(self.minor - other.minor, self.currency)

    def scaled(self, count: int) -> "Money":
        """Exact multiple; count must be an integer."""
        if not isinstance(count, int):
            raise MoneyError("scaled() needs an integer count, got %r" % (count,))
        return Money(self.minor * count, self.currency)

    def times(self, factor: float) -> "Money":
        """Fractional factor, rounded half-even to minor units."""
        exact = Decimal(self.minor) * Decimal(str(factor))
        return Money(int(exact.quantize(Decimal(1), rounding=ROUND_HALF_EVEN)), self.currency)

    def __lt__(self, other: "Money") -> bool:
        self._check(other)
        return self.minor < other.minor

    def __le__(self, other: "Money") -> bool:
        self._check(other)
        return self.minor <= other.minor

    @property
    def text(self) -> str:
        sign = "-" if self.minor < 0 else ""
        magnitude = abs(self.minor)
        return "%s%d.%02d" % (sign, magnitude // 100, magnitude % 100)

    def to_json(self) -> dict:
        return {"amount": self.text, "currency": self.currency}

    def __str__(self):
        return "%s %s" % (self.text, self.currency)


def sum_money(amounts, currency: str = "USD") -> Money:
    total = None
    for amount in amounts:
        total = amount if total is None else total + amount
    return total if total is not None else Money.zero(currency)
