"""Exact half-integers.

Index values are stored as a doubled integer so equality tests are exact;
floating point never represents an index.
"""

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class HalfInt:
    """An element of (1/2)Z, stored as twice its value."""

    twice: int

    def __post_init__(self):
        if not isinstance(self.twice, (int,)):
            raise TypeError("twice must be an int, got %r" % (self.twice,))

    # -- constructors --------------------------------------------------

    @classmethod
    def from_int(cls, n):
        return cls(2 * int(n))

    @classmethod
    def from_float(cls, x, tol=1e-6):
        """Round a float onto (1/2)Z; reject anything farther than tol away."""
        twice = round(2.0 * x)
        if abs(2.0 * x - twice) > 2.0 * tol:
            raise ValueError("%r is not a half-integer (tol %g)" % (x, tol))
        return cls(int(twice))

    # -- predicates -----------------------------------------------------

    @property
    def is_integer(self):
        return self.twice % 2 == 0

    # -- arithmetic -----------------------------------------------------

    def __add__(self, other):
        return HalfInt(self.twice + _twice_of(other))

    __radd__ = __add__

    def __sub__(self, other):
        return HalfInt(self.twice - _twice_of(other))

    def __rsub__(self, other):
        return HalfInt(_twice_of(other) - self.twice)

    def __neg__(self):
        return HalfInt(-self.twice)

    def __mul__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        return HalfInt(self.twice * n)

    __rmul__ = __mul__

    def __abs__(self):
        return HalfInt(abs(self.twice))

    # -- comparisons (mixed with ints and floats) -----------------------

    def __eq__(self, other):
        if isinstance(other, HalfInt):
            return self.twice == other.twice
        if isinstance(other, int):
            return self.twice == 2 * other
        if isinstance(other, float):
            return float(self) == other
        return NotImplemented

    def __hash__(self):
        return hash((HalfInt, self.twice))

    def __lt__(self, other):
        return self.twice < _twice_of(other)

    def __le__(self, other):
        return self.twice <= _twice_of(other)

    def __gt__(self, other):
        return self.twice > _twice_of(other)

    def __ge__(self, other):
        return self.twice >= _twice_of(other)

    # -- conversions ----------------------------------------------------

    def __float__(self):
        return self.twice / 2.0

    def as_fraction(self):
        return Fraction(self.twice, 2)

    def to_json(self):
        """Serialize as {num, den} with den in {1, 2}."""
        if self.twice % 2 == 0:
            return {"num": self.twice // 2, "den": 1}
        return {"num": self.twice, "den": 2}

    @classmethod
    def from_json(cls, obj):
        num, den = int(obj["num"]), int(obj["den"])
        if den == 1:
            return cls(2 * num)
        if den == 2:
            return cls(num)
        raise ValueError("den must be 1 or 2, got %d" % den)

    def __str__(self):
        if self.twice % 2 == 0:
            return str(self.twice // 2)
        return "%d/2" % self.twice

    def __repr__(self):
        return "HalfInt(%s)" % self


def _twice_of(x):
    if isinstance(x, HalfInt):
        return x.twice
    if isinstance(x, int):
        return 2 * x
    raise TypeError("cannot combine HalfInt with %r" % (x,))
