"""Exact coefficient rings: the rationals, the integers, and prime fields.

Ring designators are "q", "z" and "zp:<p>".  Values are kept canonical so
that equality is structural: fractions are reduced with positive
denominator, prime-field residues lie in [0, p).  A CoeffRing does the
arithmetic on raw values (Fraction for q, int for z and zp); Scalar pairs
a raw value with its ring for use at API boundaries.
"""

from __future__ import annotations

from fractions import Fraction

MAX_MODULUS = 1 << 31


class RingError(ValueError):
    """Request a ring cannot satisfy (bad designator, no inverses, ...)."""


class RingMismatchError(RingError):
    """Operands belong to different rings."""


def is_prime(p: int) -> bool:
    """Trial-division primality test, adequate for p < 2**31."""
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


class CoeffRing:
    """Handle for one of the supported coefficient rings.

    The arithmetic methods work on raw canonical values and assume their
    inputs already belong to this ring; canonical() is the checked entry
    point for foreign values.
    """

    __slots__ = ("kind", "p")

    def __init__(self, kind: str, p: int | None = None):
        if kind not in ("q", "z", "zp"):
            raise RingError(f"unknown ring kind {kind!r}")
        if kind == "zp":
            if not isinstance(p, int) or not 2 <= p < MAX_MODULUS:
                raise RingError("modulus must be an int with 2 <= p < 2**31")
            if not is_prime(p):
                raise RingError(f"modulus {p} is not prime")
        elif p is not None:
            raise RingError(f"ring {kind!r} takes no modulus")
        self.kind = kind
        self.p = p

    # -- identity ----------------------------------------------------

    def designator(self) -> str:
        if self.kind == "zp":
            return f"zp:{self.p}"
        return self.kind

    def is_field(self) -> bool:
        return self.kind in ("q", "zp")

    def __eq__(self, other):
        return (
            isinstance(other, CoeffRing)
            and self.kind == other.kind
            and self.p == other.p
        )

    def __hash__(self):
        return hash((self.kind, self.p))

    def __repr__(self):
        return f"CoeffRing({self.designator()!r})"

    def check_same(self, other: "CoeffRing"):
        if self != other:
            raise RingMismatchError(
                f"ring mismatch: {self.designator()} vs {other.designator()}"
            )

    # -- raw arithmetic ----------------------------------------------

    @property
    def zero(self):
        return Fraction(0) if self.kind == "q" else 0

    @property
    def one(self):
        return Fraction(1) if self.kind == "q" else 1

    def from_int(self, n: int):
        if self.kind == "q":
            return Fraction(n)
        if self.kind == "z":
            return int(n)
        return n % self.p

    def canonical(self, value):
        """Convert an int, Fraction or Scalar into a raw value of this ring."""
        if isinstance(value, Scalar):
            self.check_same(value.ring)
            return value.value
        if isinstance(value, bool):
            raise RingError("bool is not a ring value")
        if isinstance(value, int):
            return self.from_int(value)
        if isinstance(value, Fraction):
            if self.kind == "q":
                return value
            if self.kind == "z" and value.denominator == 1:
                return value.numerator
            raise RingError(
                f"{value!r} is not a value of ring {self.designator()}"
            )
        raise RingError(f"cannot coerce {value!r} into ring {self.designator()}")

    def add(self, a, b):
        if self.kind == "zp":
            return (a + b) % self.p
        return a + b

    def sub(self, a, b):
        if self.kind == "zp":
            return (a - b) % self.p
        return a - b

    def neg(self, a):
        if self.kind == "zp":
            return -a % self.p
        return -a

    def mul(self, a, b):
        if self.kind == "zp":
            return (a * b) % self.p
        return a * b

    def inv(self, a):
        if self.kind == "z":
            raise RingError("the integers are not a field; no inverses")
        if self.kind == "q":
            if a == 0:
                raise ZeroDivisionError("inverse of zero")
            return 1 / Fraction(a)
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero residue")
        return pow(a, -1, self.p)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    # -- sampling and enumeration ------------------------------------

    def sample(self, rng):
        """Draw a small raw value, deterministically from the given rng."""
        if self.kind == "q":
            return Fraction(rng.randint(-9, 9), rng.randint(1, 9))
        if self.kind == "z":
            return rng.randint(-9, 9)
        return rng.randrange(self.p)

    def sample_nonzero(self, rng):
        while True:
            v = self.sample(rng)
            if v != 0:
                return v

    def elements(self):
        """All raw values, available for prime fields only."""
        if self.kind != "zp":
            raise RingError(f"cannot enumerate ring {self.designator()}")
        return range(self.p)

    # -- Scalar and JSON boundaries ----------------------------------

    def scalar(self, value) -> "Scalar":
        return Scalar(self, self.canonical(value))

    def scalar_to_json(self, raw):
        if self.kind == "q":
            return {"num": str(raw.numerator), "den": str(raw.denominator)}
        if self.kind == "z":
            return {"int": str(raw)}
        return {"res": raw}

    def scalar_from_json(self, obj):
        """Parse a scalar JSON object into a raw value of this ring."""
        if not isinstance(obj, dict):
            raise RingError(f"scalar JSON must be an object, got {obj!r}")
        if self.kind == "q":
            if set(obj) != {"num", "den"}:
                raise RingError(f"rational scalar needs num/den, got {obj!r}")
            num, den = int(obj["num"]), int(obj["den"])
            if den < 1:
                raise RingError("denominator must be a positive decimal")
            return Fraction(num, den)
        if self.kind == "z":
            if set(obj) != {"int"}:
                raise RingError(f"integer scalar needs int, got {obj!r}")
            return int(obj["int"])
        if set(obj) != {"res"}:
            raise RingError(f"residue scalar needs res, got {obj!r}")
        res = obj["res"]
        if not isinstance(res, int) or not 0 <= res < self.p:
            raise RingError(f"residue {res!r} out of range for p={self.p}")
        return res


QQ = CoeffRing("q")
ZZ = CoeffRing("z")

_gf_cache: dict[int, CoeffRing] = {}


def GF(p: int) -> CoeffRing:
    ring = _gf_cache.get(p)
    if ring is None:
        ring = _gf_cache.setdefault(p, CoeffRing("zp", p))
    return ring


def parse_ring(designator: str) -> CoeffRing:
    """Parse a ring designator: "q", "z" or "zp:<p>"."""
    if designator == "q":
        return QQ
    if designator == "z":
        return ZZ
    if designator.startswith("zp:"):
        try:
            p = int(designator[3:])
        except ValueError:
            raise RingError(f"bad modulus in designator {designator!r}") from None
        return GF(p)
    raise RingError(f"unknown ring designator {designator!r}")


class Scalar:
    """A raw ring value tagged with its ring; arithmetic checks the tags."""

    __slots__ = ("ring", "value")

    def __init__(self, ring: CoeffRing, value):
        self.ring = ring
        self.value = ring.canonical(value)

    def _coerce(self, other):
        if isinstance(other, Scalar):
            self.ring.check_same(other.ring)
            return other.value
        if isinstance(other, int) and not isinstance(other, bool):
            return self.ring.from_int(other)
        return None

    def __add__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        return Scalar(self.ring, self.ring.add(self.value, v))

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        return Scalar(self.ring, self.ring.sub(self.value, v))

    def __rsub__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        return Scalar(self.ring, self.ring.sub(v, self.value))

    def __mul__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        return Scalar(self.ring, self.ring.mul(self.value, v))

    __rmul__ = __mul__

    def __truediv__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        return Scalar(self.ring, self.ring.div(self.value, v))

    def __rtruediv__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        return Scalar(self.ring, self.ring.div(v, self.value))

    def __neg__(self):
        return Scalar(self.ring, self.ring.neg(self.value))

    def inv(self):
        return Scalar(self.ring, self.ring.inv(self.value))

    def __bool__(self):
        return self.value != 0

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.ring == other.ring and self.value == other.value
        if isinstance(other, int) and not isinstance(other, bool):
            return self.value == self.ring.from_int(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.ring, self.value))

    def __repr__(self):
        return f"Scalar({self.ring.designator()}, {self.value})"

    def to_json(self):
        return self.ring.scalar_to_json(self.value)
