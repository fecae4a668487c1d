"""Exact sparse multivariate polynomials and rational functions.

Two coefficient fields are supported: arbitrary-precision rationals (QQ,
used for all symbolic proofs) and the prime field GF(2^61 - 1) (used for
randomized identity screens and lattice simulation).  Polynomials are kept
in a unique canonical form so that structural equality decides polynomial
equality; rational functions are never gcd-reduced, their equality is
decided by cross-multiplication.
"""

from __future__ import annotations

import random
import threading
from fractions import Fraction


class AlgebraError(Exception):
    pass


class SubstitutionCollapse(AlgebraError):
    """Substitution produced an identically-zero denominator."""


class IndeterminatePoint(AlgebraError):
    """Both homogeneous components vanished (base point of the map)."""


class SampleExhaustion(AlgebraError):
    """Too many randomized samples hit a vanishing denominator."""


# ---------------------------------------------------------------------------
# symbols
# ---------------------------------------------------------------------------

# Fixed head of the symbol table; the order also fixes the monomial order.
RESERVED_NAMES = ("X", "Y", "Z", "a", "b", "c", "mu", "s_a", "s_b")

# Exponents are packed into one int, _EXP_BITS bits per symbol id.  Additions
# of packed keys add exponents; degrees in this artifact stay far below the
# field capacity, so no carry can occur.
_EXP_BITS = 16
_EXP_MASK = (1 << _EXP_BITS) - 1


class Symbol:
    """An interned variable; identity is the (id, name) pair."""

    __slots__ = ("id", "name")

    def __init__(self, sid: int, name: str):
        self.id = sid
        self.name = name

    def __repr__(self):
        return f"Symbol({self.name})"

    def __hash__(self):
        return self.id

    def __eq__(self, other):
        return isinstance(other, Symbol) and other.id == self.id


class SymbolTable:
    """Append-only, thread-safe registry mapping names to Symbols."""

    def __init__(self):
        self._lock = threading.Lock()
        self._by_name: dict[str, Symbol] = {}
        self._list: list[Symbol] = []
        for name in RESERVED_NAMES:
            self.register(name)

    def register(self, name: str) -> Symbol:
        with self._lock:
            sym = self._by_name.get(name)
            if sym is None:
                sym = Symbol(len(self._list), name)
                self._by_name[name] = sym
                self._list.append(sym)
            return sym

    def get(self, name: str) -> Symbol | None:
        return self._by_name.get(name)

    def by_id(self, sid: int) -> Symbol:
        return self._list[sid]

    def __len__(self):
        return len(self._list)


SYMBOLS = SymbolTable()


def symbol(name: str) -> Symbol:
    """Return the session-wide Symbol for `name`, registering it if new."""
    return SYMBOLS.register(name)


# ---------------------------------------------------------------------------
# coefficient fields
# ---------------------------------------------------------------------------

class RationalField:
    """Exact rationals; coefficients are Python ints or Fractions."""

    name = "QQ"
    zero = 0
    one = 1

    @staticmethod
    def coerce(v):
        if isinstance(v, (int, Fraction)):
            return v
        if isinstance(v, str):
            return Fraction(v)
        raise TypeError(f"cannot coerce {v!r} into QQ")

    @staticmethod
    def add(x, y):
        return x + y

    @staticmethod
    def sub(x, y):
        return x - y

    @staticmethod
    def mul(x, y):
        return x * y

    @staticmethod
    def neg(x):
        return -x

    @staticmethod
    def inv(x):
        if x == 0:
            raise ZeroDivisionError("inverse of 0 in QQ")
        return Fraction(1, 1) / x

    @staticmethod
    def pow(x, n):
        return x ** n

    @staticmethod
    def to_str(x):
        return str(x)

    def random(self, rng: random.Random):
        # small rationals, handy for exact sampling
        return Fraction(rng.randint(-50, 50), rng.randint(1, 20))

    def __repr__(self):
        return "QQ"


class PrimeField:
    """GF(p); coefficients are ints in [0, p)."""

    def __init__(self, p: int):
        self.p = p
        self.name = f"GF({p})"
        self.zero = 0
        self.one = 1

    def coerce(self, v):
        if isinstance(v, int):
            return v % self.p
        if isinstance(v, Fraction):
            den = v.denominator % self.p
            if den == 0:
                raise ZeroDivisionError("denominator divisible by the modulus")
            return v.numerator * pow(den, -1, self.p) % self.p
        raise TypeError(f"cannot coerce {v!r} into {self.name}")

    def add(self, x, y):
        s = x + y
        return s - self.p if s >= self.p else s

    def sub(self, x, y):
        d = x - y
        return d + self.p if d < 0 else d

    def mul(self, x, y):
        return x * y % self.p

    def neg(self, x):
        return self.p - x if x else 0

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError(f"inverse of 0 in {self.name}")
        return pow(x, -1, self.p)

    def pow(self, x, n):
        return pow(x, n, self.p)

    def to_str(self, x):
        return str(x)

    def random(self, rng: random.Random):
        return rng.randrange(self.p)

    def __repr__(self):
        return self.name


QQ = RationalField()
GF61 = PrimeField((1 << 61) - 1)  # 2305843009213693951


# ---------------------------------------------------------------------------
# packed monomials
# ---------------------------------------------------------------------------

def mono_from_pairs(pairs) -> int:
    key = 0
    for sid, exp in pairs:
        if exp < 0:
            raise ValueError("negative exponent")
        key |= exp << (_EXP_BITS * sid)
    return key


def mono_exponent(key: int, sid: int) -> int:
    return (key >> (_EXP_BITS * sid)) & _EXP_MASK


def mono_iter(key: int):
    """Yield (symbol id, exponent) for the nonzero exponents of `key`."""
    sid = 0
    while key:
        e = key & _EXP_MASK
        if e:
            yield sid, e
        key >>= _EXP_BITS
        sid += 1


def mono_total_degree(key: int) -> int:
    d = 0
    while key:
        d += key & _EXP_MASK
        key >>= _EXP_BITS
    return d


def _mono_grlex_key(key: int):
    # graded lexicographic with the fixed symbol order X < Y < Z < ...:
    # higher total degree first, ties broken by the earlier symbol having
    # the larger exponent.
    dense = []
    k = key
    while k:
        dense.append(k & _EXP_MASK)
        k >>= _EXP_BITS
    return (mono_total_degree(key), tuple(dense))


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

class Polynomial:
    """Sparse multivariate polynomial in canonical form.

    `terms` maps a packed exponent key to a nonzero coefficient of `field`.
    Instances are immutable by convention; all operations return new values.
    """

    __slots__ = ("field", "terms")

    def __init__(self, field, terms: dict):
        self.field = field
        self.terms = {k: c for k, c in terms.items() if c != 0}

    # -- constructors -------------------------------------------------------

    @classmethod
    def _raw(cls, field, terms: dict) -> "Polynomial":
        # trusted: caller guarantees no zero coefficients
        p = object.__new__(cls)
        p.field = field
        p.terms = terms
        return p

    @classmethod
    def constant(cls, field, value) -> "Polynomial":
        v = field.coerce(value)
        return cls._raw(field, {0: v} if v != 0 else {})

    @classmethod
    def variable(cls, sym: Symbol, field=QQ) -> "Polynomial":
        return cls._raw(field, {mono_from_pairs([(sym.id, 1)]): field.one})

    @classmethod
    def zero(cls, field=QQ) -> "Polynomial":
        return cls._raw(field, {})

    # -- predicates / degrees ----------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def constant_value(self):
        if not self.terms:
            return self.field.zero
        if len(self.terms) == 1 and 0 in self.terms:
            return self.terms[0]
        raise ValueError("polynomial is not constant")

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(mono_total_degree(k) for k in self.terms)

    def degree_in(self, sym: Symbol) -> int:
        if not self.terms:
            return 0
        sid = sym.id
        return max(mono_exponent(k, sid) for k in self.terms)

    def symbols(self) -> set[Symbol]:
        seen: set[int] = set()
        for k in self.terms:
            for sid, _ in mono_iter(k):
                seen.add(sid)
        return {SYMBOLS.by_id(s) for s in seen}

    # -- ring operations ----------------------------------------------------

    def __add__(self, other: "Polynomial") -> "Polynomial":
        add = self.field.add
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k)
            if v is None:
                out[k] = c
            else:
                v = add(v, c)
                if v == 0:
                    del out[k]
                else:
                    out[k] = v
        return Polynomial._raw(self.field, out)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        sub = self.field.sub
        neg = self.field.neg
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k)
            if v is None:
                out[k] = neg(c)
            else:
                v = sub(v, c)
                if v == 0:
                    del out[k]
                else:
                    out[k] = v
        return Polynomial._raw(self.field, out)

    def __neg__(self) -> "Polynomial":
        neg = self.field.neg
        return Polynomial._raw(self.field, {k: neg(c) for k, c in self.terms.items()})

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        A, B = self.terms, other.terms
        if len(A) > len(B):
            A, B = B, A
        if not A:
            return Polynomial._raw(self.field, {})
        mul = self.field.mul
        add = self.field.add
        out: dict = {}
        get = out.get
        for m1, c1 in A.items():
            for m2, c2 in B.items():
                k = m1 + m2
                v = get(k)
                if v is None:
                    out[k] = mul(c1, c2)
                else:
                    v = add(v, mul(c1, c2))
                    if v == 0:
                        del out[k]
                    else:
                        out[k] = v
        return Polynomial._raw(self.field, out)

    def scale(self, value) -> "Polynomial":
        v = self.field.coerce(value)
        if v == 0:
            return Polynomial._raw(self.field, {})
        mul = self.field.mul
        return Polynomial._raw(self.field, {k: mul(c, v) for k, c in self.terms.items()})

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative polynomial power")
        result = Polynomial.constant(self.field, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base_needed = n >> 1
            if base_needed:
                base = base * base
            n = base_needed
        return result

    # -- equality / canonical form ------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, Polynomial)
            and self.field is other.field
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((id(self.field), frozenset(self.terms.items())))

    def leading_monomial(self) -> int:
        if not self.terms:
            return 0
        return max(self.terms, key=_mono_grlex_key)

    def primitive(self) -> "Polynomial":
        """Content-normalized representative over QQ.

        Integer coefficients with gcd 1 and a positive leading coefficient
        under the graded-lex order.
        """
        if self.field is not QQ:
            raise ValueError("primitive form is defined over QQ only")
        if not self.terms:
            return self
        from math import gcd, lcm

        denlcm = 1
        for c in self.terms.values():
            if isinstance(c, Fraction):
                denlcm = lcm(denlcm, c.denominator)
        g = 0
        ints = {}
        for k, c in self.terms.items():
            n = int(c * denlcm)
            ints[k] = n
            g = gcd(g, n)
        if ints[self.leading_monomial()] < 0:
            g = -g
        return Polynomial._raw(QQ, {k: n // g for k, n in ints.items()})

    # -- conversions ----------------------------------------------------------

    def map_field(self, field) -> "Polynomial":
        """Reinterpret the coefficients in another field."""
        if field is self.field:
            return self
        out = {}
        for k, c in self.terms.items():
            v = field.coerce(c)
            if v != 0:
                out[k] = v
        return Polynomial._raw(field, out)

    def evaluate(self, values: dict[int, object]):
        """Plain evaluation; `values` maps symbol id to a field element.

        Every symbol occurring in the polynomial must be bound.
        """
        field = self.field
        mul = field.mul
        add = field.add
        total = field.zero
        powcache: dict[tuple[int, int], object] = {}
        for k, coeff in self.terms.items():
            v = coeff
            for sid, e in mono_iter(k):
                key = (sid, e)
                pw = powcache.get(key)
                if pw is None:
                    try:
                        base = values[sid]
                    except KeyError:
                        raise AlgebraError(
                            f"unbound symbol {SYMBOLS.by_id(sid).name} in evaluation"
                        ) from None
                    pw = field.pow(base, e)
                    powcache[key] = pw
                v = mul(v, pw)
            total = add(total, v)
        return total

    # -- display --------------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        bits = []
        for k in sorted(self.terms, key=_mono_grlex_key, reverse=True):
            c = self.terms[k]
            factors = []
            for sid, e in mono_iter(k):
                nm = SYMBOLS.by_id(sid).name
                factors.append(nm if e == 1 else f"{nm}^{e}")
            if not factors:
                bits.append(self.field.to_str(c))
                continue
            mono = "*".join(factors)
            if c == 1:
                bits.append(mono)
            elif c == -1:
                bits.append(f"-{mono}")
            else:
                cs = self.field.to_str(c)
                if "/" in cs:
                    cs = f"({cs})"
                bits.append(f"{cs}*{mono}")
        s = " + ".join(bits)
        return s.replace("+ -", "- ")

    def __repr__(self):
        return f"Polynomial({self})"


def poly_arith(lhs: Polynomial, rhs: Polynomial, op: str) -> Polynomial:
    """Exact ring operation; `op` is one of add, sub, mul."""
    if lhs.field is not rhs.field:
        raise ValueError("operands live in different coefficient fields")
    if op == "add":
        return lhs + rhs
    if op == "sub":
        return lhs - rhs
    if op == "mul":
        return lhs * rhs
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# rational functions
# ---------------------------------------------------------------------------

class RationalFunction:
    """Quotient num/den of polynomials; den is never the zero polynomial.

    No gcd reduction is performed; equality is decided by
    cross-multiplication, so any common factors are harmless.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator in rational function")
        if num.field is not den.field:
            raise ValueError("numerator and denominator over different fields")
        self.num = num
        self.den = den

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_polynomial(cls, p: Polynomial) -> "RationalFunction":
        return cls(p, Polynomial.constant(p.field, 1))

    @classmethod
    def constant(cls, value, field=QQ) -> "RationalFunction":
        return cls.from_polynomial(Polynomial.constant(field, value))

    @classmethod
    def variable(cls, sym: Symbol, field=QQ) -> "RationalFunction":
        return cls.from_polynomial(Polynomial.variable(sym, field))

    @property
    def field(self):
        return self.num.field

    # -- arithmetic -----------------------------------------------------------

    @staticmethod
    def _coerce(other, field) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction.from_polynomial(other)
        return RationalFunction.constant(other, field)

    def __add__(self, other):
        o = self._coerce(other, self.field)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other, self.field)
        return RationalFunction(self.num * o.den - o.num * self.den, self.den * o.den)

    def __rsub__(self, other):
        o = self._coerce(other, self.field)
        return o - self

    def __mul__(self, other):
        o = self._coerce(other, self.field)
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other, self.field)
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other, self.field)
        return o / self

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __pow__(self, n: int):
        if n < 0:
            return RationalFunction(self.den ** (-n), self.num ** (-n))
        return RationalFunction(self.num ** n, self.den ** n)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def symbols(self) -> set[Symbol]:
        return self.num.symbols() | self.den.symbols()

    def total_degree(self) -> int:
        return max(self.num.total_degree(), self.den.total_degree())

    def map_field(self, field) -> "RationalFunction":
        return RationalFunction(self.num.map_field(field), self.den.map_field(field))

    def cancel_trivial(self) -> "RationalFunction":
        """Drop the common monomial factor and common integer content.

        This is scalar/monomial cancellation only (cheap and always sound);
        it is applied by composition engines to keep intermediates small and
        is never required for correctness.
        """
        num, den = self.num, self.den
        if num.is_zero():
            return RationalFunction(num, Polynomial.constant(den.field, 1))
        common = None
        for k in num.terms:
            common = k if common is None else _mono_gcd(common, k)
            if common == 0:
                break
        if common:
            for k in den.terms:
                common = _mono_gcd(common, k)
                if common == 0:
                    break
        if common:
            num = Polynomial._raw(num.field, {k - common: c for k, c in num.terms.items()})
            den = Polynomial._raw(den.field, {k - common: c for k, c in den.terms.items()})
        if num.field is QQ:
            num, den = _cancel_content(num, den)
        return RationalFunction(num, den)

    def __str__(self):
        if self.den.is_constant() and self.den.constant_value() == 1:
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"RationalFunction({self})"


def poly_divexact(A: Polynomial, B: Polynomial) -> Polynomial | None:
    """Quotient Q with A == Q * B, or None when B does not divide A.

    Heap-driven long division; used by composition engines to cancel
    spurious common factors accumulated along map compositions.
    """
    import heapq

    if B.is_zero():
        return None
    if A.is_zero():
        return A
    if A.field is not B.field:
        raise ValueError("operands live in different coefficient fields")
    # degree-profile fast reject
    for sid in {s for k in B.terms for s, _ in mono_iter(k)}:
        if max(mono_exponent(k, sid) for k in A.terms) < max(
            mono_exponent(k, sid) for k in B.terms
        ):
            return None
    field = A.field
    bl = max(B.terms, key=_mono_grlex_key)
    blc = B.terms[bl]
    bl_fields = list(mono_iter(bl))
    b_items = [(m, c) for m, c in B.terms.items() if m != bl]
    rem = dict(A.terms)

    def heapkey(mono):
        deg, dense = _mono_grlex_key(mono)
        return (-deg, tuple(-e for e in dense), mono)

    heap = [heapkey(m) for m in rem]
    heapq.heapify(heap)
    q: dict = {}
    if field is QQ:
        divc = lambda c: Fraction(c) / blc
    else:
        inv_blc = field.inv(blc)
        divc = lambda c: field.mul(c, inv_blc)
    while heap:
        mono = heapq.heappop(heap)[2]
        c = rem.pop(mono, None)
        if c is None:
            continue
        for sid, e in bl_fields:
            if mono_exponent(mono, sid) < e:
                return None
        qm = mono - bl
        qc = divc(c)
        if isinstance(qc, Fraction) and qc.denominator == 1:
            qc = int(qc)
        q[qm] = qc
        for m, bc in b_items:
            k = qm + m
            v = rem.get(k)
            if v is None:
                rem[k] = field.neg(field.mul(qc, bc))
                heapq.heappush(heap, heapkey(k))
            else:
                v = field.sub(v, field.mul(qc, bc))
                if v == 0:
                    del rem[k]
                else:
                    rem[k] = v
    return Polynomial._raw(field, q) if not rem else None


def rf_reduce(rf: "RationalFunction", candidates) -> "RationalFunction":
    """Cancel candidate factors dividing both num and den, then contents.

    Sound for any candidate list: a factor is cancelled only when it divides
    the numerator and the denominator exactly.
    """
    num, den = rf.num, rf.den
    for cand in candidates:
        if cand.is_constant():
            continue
        while True:
            qn = poly_divexact(num, cand)
            if qn is None:
                break
            qd = poly_divexact(den, cand)
            if qd is None:
                break
            num, den = qn, qd
    return RationalFunction(num, den).cancel_trivial()


def _mono_gcd(k1: int, k2: int) -> int:
    out = 0
    shift = 0
    while k1 and k2:
        e = min(k1 & _EXP_MASK, k2 & _EXP_MASK)
        if e:
            out |= e << shift
        k1 >>= _EXP_BITS
        k2 >>= _EXP_BITS
        shift += _EXP_BITS
    return out


def _cancel_content(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Divide num and den by their common scalar content (QQ only)."""
    from math import gcd, lcm

    denlcm = 1
    for c in list(num.terms.values()) + list(den.terms.values()):
        if isinstance(c, Fraction):
            denlcm = lcm(denlcm, c.denominator)
    gn = 0
    for c in num.terms.values():
        gn = gcd(gn, int(c * denlcm))
    gd = 0
    for c in den.terms.values():
        gd = gcd(gd, int(c * denlcm))
    g = gcd(gn, gd)
    if g == 0:
        return num, den
    scale = Fraction(denlcm, g)
    if scale == 1:
        return num, den
    out = []
    for p in (num, den):
        terms = {}
        for k, c in p.terms.items():
            v = c * scale
            terms[k] = int(v) if v.denominator == 1 else v
        out.append(Polynomial._raw(QQ, terms))
    return out[0], out[1]


# ---------------------------------------------------------------------------
# substitution
# ---------------------------------------------------------------------------

def _poly_subst_hom(
    poly: Polynomial,
    pairs: dict[int, tuple[Polynomial, Polynomial]],
    bounds: dict[int, int],
) -> Polynomial:
    """Homogenized substitution: returns  (prod den_i^E_i) * poly(n_i/d_i).

    `pairs` maps symbol id to the (numerator, denominator) polynomials of the
    binding; `bounds` gives the homogenization exponent E_i (the max degree of
    symbol i over the whole rational function being substituted into).
    """
    field = poly.field
    one = Polynomial.constant(field, 1)
    powcache: dict[tuple[int, int, int], Polynomial] = {}

    def cached_pow(sid: int, which: int, p: Polynomial, e: int) -> Polynomial:
        if e == 0:
            return one
        key = (sid, which, e)
        v = powcache.get(key)
        if v is None:
            v = p ** e
            powcache[key] = v
        return v

    total = Polynomial.zero(field)
    for mono, coeff in poly.terms.items():
        residual = mono
        factor = None
        for sid, (np_, dp_) in pairs.items():
            e = mono_exponent(mono, sid)
            if e:
                residual -= e << (_EXP_BITS * sid)
            need_den = bounds[sid] - e
            piece = cached_pow(sid, 0, np_, e) if e else None
            if need_den:
                dpow = cached_pow(sid, 1, dp_, need_den)
                piece = dpow if piece is None else piece * dpow
            if piece is not None:
                factor = piece if factor is None else factor * piece
        term = Polynomial._raw(field, {residual: coeff})
        total = total + (term if factor is None else term * factor)
    return total


def substitute_projective(
    target: RationalFunction,
    bindings: dict[Symbol, tuple[Polynomial, Polynomial]],
) -> RationalFunction:
    """Simultaneous substitution allowing projective (num, den) bindings.

    A binding with a zero denominator polynomial denotes the constant point
    at infinity.  Raises SubstitutionCollapse if the resulting denominator is
    the zero polynomial.
    """
    pairs: dict[int, tuple[Polynomial, Polynomial]] = {}
    for sym, (np_, dp_) in bindings.items():
        if np_.is_zero() and dp_.is_zero():
            raise ValueError(f"binding for {sym.name} is the indeterminate 0/0")
        pairs[sym.id] = (np_, dp_)
    if not pairs:
        return target
    bounds = {
        sid: max(
            max((mono_exponent(k, sid) for k in target.num.terms), default=0),
            max((mono_exponent(k, sid) for k in target.den.terms), default=0),
        )
        for sid in pairs
    }
    new_num = _poly_subst_hom(target.num, pairs, bounds)
    new_den = _poly_subst_hom(target.den, pairs, bounds)
    if new_den.is_zero():
        raise SubstitutionCollapse("denominator vanished identically under substitution")
    return RationalFunction(new_num, new_den)


def substitute(
    target: RationalFunction,
    bindings: dict[Symbol, "RationalFunction | Polynomial | int | Fraction"],
) -> RationalFunction:
    """Exact simultaneous substitution of rational functions for symbols.

    Unbound symbols pass through.  Binding denominators must be nonzero
    polynomials (use substitute_projective for points at infinity).
    """
    proj = {}
    field = target.field
    for sym, val in bindings.items():
        rf = RationalFunction._coerce(val, field)
        proj[sym] = (rf.num, rf.den)
    return substitute_projective(target, proj)


# ---------------------------------------------------------------------------
# identity testing
# ---------------------------------------------------------------------------

def _cross_difference_is_zero(lhs: RationalFunction, rhs: RationalFunction) -> bool:
    # fused accumulation of num_l*den_r - num_r*den_l
    field = lhs.field
    mul = field.mul
    add = field.add
    acc: dict = {}
    get = acc.get

    def accumulate(A: Polynomial, B: Polynomial, sign: int):
        for m1, c1 in A.terms.items():
            for m2, c2 in B.terms.items():
                k = m1 + m2
                c = mul(c1, c2)
                if sign < 0:
                    c = field.neg(c)
                v = get(k)
                if v is None:
                    acc[k] = c
                else:
                    v = add(v, c)
                    if v == 0:
                        del acc[k]
                    else:
                        acc[k] = v

    accumulate(lhs.num, rhs.den, 1)
    accumulate(rhs.num, lhs.den, -1)
    return not acc


def rf_equal_exact(lhs: RationalFunction, rhs: RationalFunction) -> bool:
    """True iff num_l*den_r - num_r*den_l expands to the zero polynomial."""
    if lhs.field is not rhs.field:
        raise ValueError("operands live in different coefficient fields")
    return _cross_difference_is_zero(lhs, rhs)


def rf_equal_randomized(
    lhs: RationalFunction,
    rhs: RationalFunction,
    trials: int = 20,
    rng_seed: int = 0,
    field: PrimeField = GF61,
) -> bool:
    """Schwartz-Zippel screen over GF(2^61 - 1).

    One-sided: a False answer carries a concrete witness sample; True can be
    wrong with probability at most (d/|field|)^trials, d the sum of total
    degrees of the two cross-products.  Samples hitting a vanishing
    denominator are discarded and redrawn.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    ln, ld = lhs.num.map_field(field), lhs.den.map_field(field)
    rn, rd = rhs.num.map_field(field), rhs.den.map_field(field)
    if ld.is_zero() or rd.is_zero():
        raise AlgebraError("denominator vanishes modulo the sampling prime")
    sids = set()
    for p in (ln, ld, rn, rd):
        for s in p.symbols():
            sids.add(s.id)
    rng = random.Random(rng_seed)
    agreed = 0
    misses = 0
    limit = 100 * trials
    while agreed < trials:
        point = {sid: rng.randrange(field.p) for sid in sids}
        dl = ld.evaluate(point)
        dr = rd.evaluate(point)
        if dl == 0 or dr == 0:
            misses += 1
            if misses >= limit:
                raise SampleExhaustion(
                    f"{misses} consecutive samples hit a vanishing denominator"
                )
            continue
        misses = 0
        left = field.mul(ln.evaluate(point), dr)
        right = field.mul(rn.evaluate(point), dl)
        if left != right:
            return False
        agreed += 1
    return True


# ---------------------------------------------------------------------------
# projective points and evaluation
# ---------------------------------------------------------------------------

class ProjPoint:
    """A point of the projective line over `field`, as a (u : v) pair."""

    __slots__ = ("field", "u", "v")

    def __init__(self, u, v, field=QQ):
        u = field.coerce(u)
        v = field.coerce(v)
        if u == 0 and v == 0:
            raise ValueError("(0 : 0) is not a projective point")
        self.field = field
        self.u = u
        self.v = v

    @classmethod
    def finite(cls, value, field=QQ) -> "ProjPoint":
        return cls(value, field.one, field)

    @classmethod
    def infinity(cls, field=QQ) -> "ProjPoint":
        return cls(field.one, field.zero, field)

    def is_infinity(self) -> bool:
        return self.v == 0

    def value(self):
        """The affine value u/v; raises for the point at infinity."""
        if self.v == 0:
            raise ZeroDivisionError("point at infinity has no affine value")
        if self.field is QQ:
            return Fraction(self.u) / self.v if self.u % self.v else self.u // self.v
        return self.field.mul(self.u, self.field.inv(self.v))

    def __eq__(self, other):
        if not isinstance(other, ProjPoint) or other.field is not self.field:
            return NotImplemented
        return self.field.sub(
            self.field.mul(self.u, other.v), self.field.mul(other.u, self.v)
        ) == 0

    def __hash__(self):
        raise TypeError("ProjPoint is unhashable (scale-equivalence classes)")

    def __str__(self):
        if self.is_infinity():
            return "inf"
        v = self.value()
        return self.field.to_str(v)

    def __repr__(self):
        return f"ProjPoint({self.field.to_str(self.u)} : {self.field.to_str(self.v)})"


def eval_projective(
    target: RationalFunction,
    point_bindings: dict[Symbol, "ProjPoint | int | Fraction"],
) -> ProjPoint:
    """Homogeneous evaluation of a rational function at projective points.

    Every symbol of `target` must be bound; infinity inputs are handled
    without exception.  Raises IndeterminatePoint when both homogeneous
    components evaluate to zero.
    """
    field = target.field
    pairs: dict[int, tuple[object, object]] = {}
    for sym, val in point_bindings.items():
        if isinstance(val, ProjPoint):
            pairs[sym.id] = (field.coerce(val.u), field.coerce(val.v))
        else:
            pairs[sym.id] = (field.coerce(val), field.one)
    for s in target.symbols():
        if s.id not in pairs:
            raise AlgebraError(f"unbound symbol {s.name} in projective evaluation")
    bounds = {
        sid: max(
            max((mono_exponent(k, sid) for k in target.num.terms), default=0),
            max((mono_exponent(k, sid) for k in target.den.terms), default=0),
        )
        for sid in pairs
    }

    def hom_eval(poly: Polynomial):
        total = field.zero
        for mono, coeff in poly.terms.items():
            v = coeff
            for sid, (nu, de) in pairs.items():
                e = mono_exponent(mono, sid)
                if e:
                    v = field.mul(v, field.pow(nu, e))
                rest = bounds[sid] - e
                if rest:
                    v = field.mul(v, field.pow(de, rest))
                if v == 0:
                    break
            total = field.add(total, v)
        return total

    u = hom_eval(target.num)
    v = hom_eval(target.den)
    if u == 0 and v == 0:
        raise IndeterminatePoint("both homogeneous components vanish at the point")
    return ProjPoint(u, v, field)
