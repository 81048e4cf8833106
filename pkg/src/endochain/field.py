"""Exact coefficient fields: the rationals and prime fields GF(p).

Coefficients are either ``fractions.Fraction`` or ``GFElement``; both support
+, -, *, /, ==, bool (nonzero test) and hash, which is all the engine needs.
A ``FieldSpec`` carries the arithmetic entry points (zero/one/coercion) so the
rest of the code never branches on the field kind.
"""

from fractions import Fraction

from .errors import SchemaError


class GFElement:
    """An element of GF(p), normalized to 0 <= value < p."""

    __slots__ = ("v", "p")

    def __init__(self, v, p):
        self.v = v % p
        self.p = p

    def __add__(self, other):
        return GFElement(self.v + other.v, self.p)

    def __sub__(self, other):
        return GFElement(self.v - other.v, self.p)

    def __neg__(self):
        return GFElement(-self.v, self.p)

    def __mul__(self, other):
        return GFElement(self.v * other.v, self.p)

    def __truediv__(self, other):
        if other.v == 0:
            raise ZeroDivisionError("division by zero in GF(p)")
        return GFElement(self.v * pow(other.v, -1, self.p), self.p)

    def __eq__(self, other):
        return isinstance(other, GFElement) and self.v == other.v and self.p == other.p

    def __hash__(self):
        return hash((self.v, self.p))

    def __bool__(self):
        return self.v != 0

    def __repr__(self):
        return f"{self.v}"


def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class FieldSpec:
    """The coefficient field: kind 'rational' (char 0) or 'prime' (GF(p))."""

    __slots__ = ("kind", "characteristic")

    def __init__(self, kind="rational", characteristic=0):
        if kind not in ("rational", "prime"):
            raise SchemaError(f"unknown field kind {kind!r}")
        if kind == "rational":
            characteristic = 0
        elif not _is_prime(characteristic):
            raise SchemaError(f"characteristic {characteristic} is not prime")
        self.kind = kind
        self.characteristic = characteristic

    # -- arithmetic entry points -------------------------------------------

    def zero(self):
        if self.kind == "rational":
            return Fraction(0)
        return GFElement(0, self.characteristic)

    def one(self):
        if self.kind == "rational":
            return Fraction(1)
        return GFElement(1, self.characteristic)

    def coerce(self, x):
        """Coerce an int, Fraction, field element or 'p/q' string."""
        if self.kind == "rational":
            if isinstance(x, Fraction):
                return x
            if isinstance(x, int):
                return Fraction(x)
            if isinstance(x, str):
                return Fraction(x)
        else:
            p = self.characteristic
            if isinstance(x, GFElement):
                if x.p != p:
                    raise SchemaError("GF element from wrong field")
                return x
            if isinstance(x, int):
                return GFElement(x, p)
            if isinstance(x, str):
                if "/" in x:
                    num, den = x.split("/")
                    return GFElement(int(num), p) / GFElement(int(den), p)
                return GFElement(int(x), p)
        raise SchemaError(f"cannot coerce {x!r} into {self}")

    def format(self, c):
        """Render a coefficient as a decimal string (rationals as 'p/q')."""
        if self.kind == "rational":
            return str(c)
        return str(c.v)

    # -- plumbing ----------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, FieldSpec)
            and self.kind == other.kind
            and self.characteristic == other.characteristic
        )

    def __hash__(self):
        return hash((self.kind, self.characteristic))

    def __repr__(self):
        if self.kind == "rational":
            return "QQ"
        return f"GF({self.characteristic})"

    def as_json(self):
        if self.kind == "rational":
            return {"kind": "rational"}
        return {"kind": "prime", "p": self.characteristic}


QQ = FieldSpec("rational")


def field_from_json(obj):
    if not isinstance(obj, dict) or "kind" not in obj:
        raise SchemaError("field must be {'kind': 'rational'} or {'kind': 'prime', 'p': ...}")
    if obj["kind"] == "rational":
        return FieldSpec("rational")
    if obj["kind"] == "prime":
        return FieldSpec("prime", int(obj.get("p", 0)))
    raise SchemaError(f"unknown field kind {obj['kind']!r}")
