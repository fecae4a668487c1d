"""Parametric Yang-Baxter maps, reflection maps, and their checkers.

All checkers share one symbolic composition engine, so index and parameter
conventions cannot drift between checks.  Exact verdicts expand identities
over QQ; randomized verdicts sample the same composed identities over
GF(2^61 - 1) and always attach a witness on failure.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass

from .algebra import (
    GF61,
    QQ,
    Polynomial,
    ProjPoint,
    RationalFunction,
    SampleExhaustion,
    eval_projective,
    rf_equal_exact,
    rf_reduce,
    substitute,
    symbol,
)

SX = symbol("X")
SY = symbol("Y")
SZ = symbol("Z")
SA = symbol("a")
SB = symbol("b")
SC = symbol("c")
SMU = symbol("mu")
SSA = symbol("s_a")
SSB = symbol("s_b")


class UnknownFamily(Exception):
    pass


class NotASymmetry(Exception):
    pass


def _rf(sym) -> RationalFunction:
    return RationalFunction.variable(sym)


FAMILIES = ("F_I", "F_II", "F_III", "F_IV", "F_V")

_ROMAN = {"I": 1, "II": 2, "III": 3, "IV": 4, "V": 5}


def normalize_family(tag: str) -> str:
    """Accepts F_I / FI / F1 / f3 ... and returns the canonical tag."""
    t = str(tag).strip().upper().replace("_", "").replace("-", "")
    if not t.startswith("F"):
        raise UnknownFamily(f"unknown family {tag!r}")
    rest = t[1:]
    if rest.isdigit():
        n = int(rest)
    else:
        n = _ROMAN.get(rest, 0)
    if not 1 <= n <= 5:
        raise UnknownFamily(f"unknown family {tag!r}")
    return FAMILIES[n - 1]


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class YangBaxterMap:
    """A parametric map (X, Y) -> (f_ab(X, Y), g_ab(X, Y))."""

    f: RationalFunction
    g: RationalFunction
    family_id: str = "custom"

    def __post_init__(self):
        if self.f.den.is_zero() or self.g.den.is_zero():
            raise ZeroDivisionError("map component with zero denominator")


def builtin_family(family_id: str) -> YangBaxterMap:
    """The five quadrirational families, with their standard kernels."""
    fam = normalize_family(family_id)
    X, Y, a, b = _rf(SX), _rf(SY), _rf(SA), _rf(SB)
    if fam == "F_I":
        P = ((1 - b) * X + b - a + (a - 1) * Y) / (
            b * (1 - a) * X + (a - b) * X * Y + a * (b - 1) * Y
        )
        f, g = a * Y * P, b * X * P
    elif fam == "F_II":
        P = (a * X - b * Y + b - a) / (X - Y)
        f, g = (Y / a) * P, (X / b) * P
    elif fam == "F_III":
        P = (a * X - b * Y) / (X - Y)
        f, g = (Y / a) * P, (X / b) * P
    elif fam == "F_IV":
        P = 1 + (b - a) / (X - Y)
        f, g = Y * P, X * P
    else:  # F_V
        P = (a - b) / (X - Y)
        f, g = Y + P, X + P
    return YangBaxterMap(f.cancel_trivial(), g.cancel_trivial(), fam)


def _structural_factors(ybm: YangBaxterMap) -> list[RationalFunction]:
    """Building blocks whose images seed the cancellation library.

    Compositions of quadrirational maps develop common num/den factors that
    are images of low-degree pieces of the map formulas; trial division by
    those images keeps intermediates near their reduced size.
    """
    X, Y, a, b = _rf(SX), _rf(SY), _rf(SA), _rf(SB)
    base = [X, Y, a, b, X - Y, a - b, 1 - a, 1 - b, X - 1, Y - 1]
    for part in (ybm.f, ybm.g):
        base.append(RationalFunction.from_polynomial(part.num))
        base.append(RationalFunction.from_polynomial(part.den))
    return base


def _coeffs_in_x(p: Polynomial, sym) -> dict[int, Polynomial]:
    """Coefficient polynomials of sym^k, with sym stripped out."""
    from .algebra import _EXP_BITS, mono_exponent

    out: dict[int, dict] = {}
    sid = sym.id
    for mono, c in p.terms.items():
        e = mono_exponent(mono, sid)
        out.setdefault(e, {})[mono - (e << (_EXP_BITS * sid))] = c
    return {e: Polynomial._raw(p.field, terms) for e, terms in out.items()}


def _is_mobius_in(rf: RationalFunction, sym) -> bool:
    if rf.num.degree_in(sym) > 1 or rf.den.degree_in(sym) > 1:
        return False
    nc = _coeffs_in_x(rf.num, sym)
    dc = _coeffs_in_x(rf.den, sym)
    zero = Polynomial.zero(rf.field)
    det = nc.get(1, zero) * dc.get(0, zero) - nc.get(0, zero) * dc.get(1, zero)
    return not det.is_zero()


@dataclass(frozen=True, eq=False)
class ReflectionMap:
    """Boundary map (X, a) -> (h_a(X), sigma(a)).

    `h` is a Moebius map in X whose coefficients may involve a, mu and, in
    degenerate mode, the symbol s_a standing for sigma(a).  `sigma` is a
    rational function of a, or None for the degenerate free-symbol mode
    where the checkers treat sigma(a), sigma(b) as independent fresh
    symbols s_a, s_b.
    """

    h: RationalFunction
    sigma: RationalFunction | None
    name: str = ""

    def __post_init__(self):
        if not _is_mobius_in(self.h, SX):
            raise ValueError(f"h is not a Moebius map in X: {self.h}")

    @property
    def sigma_is_free(self) -> bool:
        return self.sigma is None

    @property
    def mu_present(self) -> bool:
        syms = self.h.symbols()
        if self.sigma is not None:
            syms |= self.sigma.symbols()
        return SMU in syms

    def sigma_at(self, param: RationalFunction) -> RationalFunction:
        if self.sigma is None:
            raise ValueError("free-symbol sigma has no closed form")
        return substitute(self.sigma, {SA: param})

    def h_at(
        self,
        x_expr: RationalFunction,
        param: RationalFunction,
        sigma_of_param: RationalFunction,
    ) -> RationalFunction:
        """h_param(x_expr); s_a inside h denotes sigma(param)."""
        return substitute(
            self.h, {SX: x_expr, SA: param, SSA: sigma_of_param}
        ).cancel_trivial()

    def resolve_sigma(self, sigma: RationalFunction, name: str = "") -> "ReflectionMap":
        """Concrete variant with the free sigma replaced by an explicit map."""
        sa = substitute(sigma, {SA: _rf(SA)})
        h = substitute(self.h, {SSA: sa})
        return ReflectionMap(h.cancel_trivial(), sigma, name or self.name)


def identity_reflection() -> ReflectionMap:
    return ReflectionMap(_rf(SX), _rf(SA), name="identity")


@dataclass(frozen=True, eq=False)
class SymmetryMap:
    """Involutive parameter-indexed Moebius symmetry s(a) acting on X."""

    s: RationalFunction
    name: str = ""

    def __post_init__(self):
        comp = substitute(self.s, {SX: self.s})
        if not rf_equal_exact(comp, _rf(SX)):
            raise ValueError("symmetry map is not an involution")

    def at(self, x_expr: RationalFunction, param: RationalFunction) -> RationalFunction:
        return substitute(self.s, {SX: x_expr, SA: param}).cancel_trivial()


@dataclass
class CheckReport:
    """Outcome of one named identity check."""

    name: str
    status: str  # "pass" | "fail"
    method: str  # "exact" | "randomized"
    witness: dict | None = None
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> dict:
        # timing is intentionally omitted: reports must be reproducible
        # bit-for-bit for a fixed command line and seed
        return {
            "name": self.name,
            "status": self.status,
            "method": self.method,
            "witness": self.witness,
        }


# ---------------------------------------------------------------------------
# composition engine
# ---------------------------------------------------------------------------

class FactorLibrary:
    """Growing set of small primitive polynomials used for trial division.

    Candidates are cancelled from intermediates only when they divide both
    numerator and denominator exactly, so an irrelevant candidate can never
    change a represented function.  New entries are first split by the
    existing ones, which keeps the library close to irreducible pieces.
    """

    MAX_TERMS = 400

    def __init__(self):
        self.items: list[Polynomial] = []
        self._seen: set = set()

    def add(self, p: Polynomial) -> None:
        if p.is_zero() or p.is_constant() or len(p.terms) > self.MAX_TERMS:
            return
        if p.field is QQ:
            p = p.primitive()
        key = frozenset(p.terms.items())
        if key in self._seen:
            return
        from .algebra import poly_divexact

        for q in self.items:
            while True:
                d = poly_divexact(p, q)
                if d is None or d.is_constant():
                    break
                p = d.primitive() if d.field is QQ else d
        if p.is_constant():
            return
        key = frozenset(p.terms.items())
        if key in self._seen:
            return
        self._seen.add(key)
        self.items.append(p)
        self.items.sort(key=lambda q: len(q.terms))

    def add_rf(self, rf: RationalFunction) -> None:
        self.add(rf.num)
        self.add(rf.den)


def apply_r_symbolic(
    ybm: YangBaxterMap,
    state: list[RationalFunction],
    params: list[RationalFunction],
    k: int,
    l: int,
    library: FactorLibrary | None = None,
) -> None:
    """In-place R_{kl}: slot k <- f(X_k, X_l), slot l <- g(X_k, X_l).

    Parameters are site-attached: the map arguments (a, b) are bound to
    (params[k], params[l]).  This single rule realises both R_ij and R_ji
    of the displayed index convention.  Common factors contributed by the
    step inputs are cancelled to keep intermediates small; this never
    changes the represented function.
    """
    binds = {SX: state[k], SY: state[l], SA: params[k], SB: params[l]}
    if library is not None:
        for piece in _structural_factors(ybm):
            library.add_rf(substitute(piece, binds))
        for rf in (state[k], state[l], params[k], params[l]):
            library.add_rf(rf)
        cands = library.items
    else:
        cands = []
    fk = rf_reduce(substitute(ybm.f, binds).cancel_trivial(), cands)
    gl = rf_reduce(substitute(ybm.g, binds).cancel_trivial(), cands)
    state[k] = fk
    state[l] = gl


def _identity_report(
    name: str,
    sides: list[tuple[RationalFunction, RationalFunction]],
    method: str,
    trials: int,
    rng_seed: int,
) -> CheckReport:
    t0 = time.perf_counter()
    if method == "exact":
        for i, (lhs, rhs) in enumerate(sides):
            if not rf_equal_exact(lhs, rhs):
                return CheckReport(
                    name, "fail", "exact", {"component": i}, time.perf_counter() - t0
                )
        return CheckReport(name, "pass", "exact", None, time.perf_counter() - t0)
    if method != "randomized":
        raise ValueError(f"unknown method {method!r}")

    field = GF61
    reduced = []
    sids: set[int] = set()
    for lhs, rhs in sides:
        quad = (
            lhs.num.map_field(field),
            lhs.den.map_field(field),
            rhs.num.map_field(field),
            rhs.den.map_field(field),
        )
        reduced.append(quad)
        for p in quad:
            for s in p.symbols():
                sids.add(s.id)
    rng = random.Random(rng_seed)
    done = 0
    misses = 0
    while done < trials:
        point = {sid: rng.randrange(field.p) for sid in sids}
        dens = [(q[1].evaluate(point), q[3].evaluate(point)) for q in reduced]
        if any(dl == 0 or dr == 0 for dl, dr in dens):
            misses += 1
            if misses >= 100 * trials:
                raise SampleExhaustion("all samples hit singular loci")
            continue
        misses = 0
        for i, ((ln, ld, rn, rd), (dl, dr)) in enumerate(zip(reduced, dens)):
            lv = field.mul(ln.evaluate(point), dr)
            rv = field.mul(rn.evaluate(point), dl)
            if lv != rv:
                witness = {
                    "component": i,
                    "field": field.name,
                    "point": {
                        symbol_name(sid): str(v) for sid, v in sorted(point.items())
                    },
                }
                return CheckReport(
                    name, "fail", "randomized", witness, time.perf_counter() - t0
                )
        done += 1
    return CheckReport(name, "pass", "randomized", None, time.perf_counter() - t0)


def symbol_name(sid: int) -> str:
    from .algebra import SYMBOLS

    return SYMBOLS.by_id(sid).name


# ---------------------------------------------------------------------------
# checkers
# ---------------------------------------------------------------------------

def yang_baxter_sides(ybm: YangBaxterMap):
    """Both sides of R12(a,b) R13(a,c) R23(b,c) = R23(b,c) R13(a,c) R12(a,b)."""
    params = [_rf(SA), _rf(SB), _rf(SC)]
    lib = FactorLibrary()
    lhs = [_rf(SX), _rf(SY), _rf(SZ)]
    for (k, l) in ((1, 2), (0, 2), (0, 1)):  # rightmost factor acts first
        apply_r_symbolic(ybm, lhs, params, k, l, lib)
    rhs = [_rf(SX), _rf(SY), _rf(SZ)]
    for (k, l) in ((0, 1), (0, 2), (1, 2)):
        apply_r_symbolic(ybm, rhs, params, k, l, lib)
    return list(zip(lhs, rhs))


def check_yang_baxter(
    ybm: YangBaxterMap, method: str = "exact", trials: int = 100, rng_seed: int = 0
) -> CheckReport:
    sides = yang_baxter_sides(ybm)
    return _identity_report(
        f"yang_baxter/{ybm.family_id}", sides, method, trials, rng_seed
    )


def check_reversibility(
    ybm: YangBaxterMap, method: str = "exact", trials: int = 100, rng_seed: int = 0
) -> CheckReport:
    state = [_rf(SX), _rf(SY)]
    params = [_rf(SA), _rf(SB)]
    lib = FactorLibrary()
    apply_r_symbolic(ybm, state, params, 0, 1, lib)  # R12(a,b)
    apply_r_symbolic(ybm, state, params, 1, 0, lib)  # R21(b,a)
    sides = [(state[0], _rf(SX)), (state[1], _rf(SY))]
    return _identity_report(
        f"reversibility/{ybm.family_id}", sides, method, trials, rng_seed
    )


def check_pi_symmetry(
    ybm: YangBaxterMap, method: str = "exact", trials: int = 100, rng_seed: int = 0
) -> CheckReport:
    """f_ab(X, Y) = g_ba(Y, X); licenses one boundary map for both ends."""
    swapped = substitute(ybm.g, {SX: _rf(SY), SY: _rf(SX), SA: _rf(SB), SB: _rf(SA)})
    sides = [(ybm.f, swapped)]
    return _identity_report(
        f"pi_symmetry/{ybm.family_id}", sides, method, trials, rng_seed
    )


def symmetry_conjugate(ybm: YangBaxterMap, sym: SymmetryMap) -> YangBaxterMap:
    """Conjugated map (s(a) x Id) R(a,b) (Id x s(b)).

    Requires s(a) x s(b) to commute with R(a, b); raises NotASymmetry
    otherwise.
    """
    X, Y, a, b = _rf(SX), _rf(SY), _rf(SA), _rf(SB)
    sx = sym.at(X, a)
    sy = sym.at(Y, b)
    f_of_s = substitute(ybm.f, {SX: sx, SY: sy}).cancel_trivial()
    g_of_s = substitute(ybm.g, {SX: sx, SY: sy}).cancel_trivial()
    if not (
        rf_equal_exact(f_of_s, sym.at(ybm.f, a))
        and rf_equal_exact(g_of_s, sym.at(ybm.g, b))
    ):
        raise NotASymmetry("s(a) x s(b) does not commute with the map")
    f_new = sym.at(substitute(ybm.f, {SY: sy}), a).cancel_trivial()
    g_new = substitute(ybm.g, {SY: sy}).cancel_trivial()
    return YangBaxterMap(f_new, g_new, family_id=f"{ybm.family_id}^s")


def reflection_sides(ybm: YangBaxterMap, refl: ReflectionMap):
    """Final (X3, Y3) of both composition chains of the reflection equation.

    Left chain:  R12(a,b), K2(b), R21(sigma(b),a), K1(a).
    Right chain: K1(a), R12(sigma(a),b), K2(b), R21(sigma(b),sigma(a)).
    """
    X, Y, a, b = _rf(SX), _rf(SY), _rf(SA), _rf(SB)
    if refl.sigma_is_free:
        sig_a, sig_b = _rf(SSA), _rf(SSB)
    else:
        sig_a, sig_b = refl.sigma_at(a), refl.sigma_at(b)
    lib = FactorLibrary()
    for rf in (sig_a, sig_b):
        lib.add_rf(rf)

    def h_with(x_expr, param, sig_of_param):
        out = refl.h_at(x_expr, param, sig_of_param)
        lib.add_rf(x_expr)
        return rf_reduce(out, lib.items)

    def r_pair(x_expr, y_expr, pa, pb):
        binds = {SX: x_expr, SY: y_expr, SA: pa, SB: pb}
        for piece in _structural_factors(ybm):
            lib.add_rf(substitute(piece, binds))
        for rf in (x_expr, y_expr, pa, pb):
            lib.add_rf(rf)
        return (
            rf_reduce(substitute(ybm.f, binds).cancel_trivial(), lib.items),
            rf_reduce(substitute(ybm.g, binds).cancel_trivial(), lib.items),
        )

    # left-hand chain
    x1, y1 = r_pair(X, Y, a, b)
    y2 = h_with(y1, b, sig_b)
    y3, x2 = r_pair(y2, x1, sig_b, a)  # R21: f lands on site 2, g on site 1
    x3 = h_with(x2, a, sig_a)
    # right-hand chain
    x1p = h_with(X, a, sig_a)
    x2p, y1p = r_pair(x1p, Y, sig_a, b)
    y2p = h_with(y1p, b, sig_b)
    y3p, x3p = r_pair(y2p, x2p, sig_b, sig_a)
    return [(x3, x3p), (y3, y3p)]


def check_reflection(
    ybm: YangBaxterMap,
    refl: ReflectionMap,
    method: str = "exact",
    trials: int = 100,
    rng_seed: int = 0,
) -> CheckReport:
    sides = reflection_sides(ybm, refl)
    tag = refl.name or "reflection_map"
    return _identity_report(
        f"reflection/{ybm.family_id}/{tag}", sides, method, trials, rng_seed
    )


def check_involutive_reflection(
    refl: ReflectionMap, method: str = "exact", trials: int = 100, rng_seed: int = 0
) -> CheckReport:
    """sigma(sigma(a)) = a and h_{sigma(a)}(h_a(X)) = X.

    In free-sigma mode the identities are checked under the involution
    premise, i.e. with sigma(a) a fresh symbol s_a and sigma(s_a) = a.
    """
    X, a = _rf(SX), _rf(SA)
    sides = []
    if refl.sigma_is_free:
        sa = _rf(SSA)
        inner = refl.h_at(X, a, sa)
        outer = refl.h_at(inner, sa, a)
        sides.append((outer, X))
    else:
        sig = refl.sigma_at(a)
        sig2 = refl.sigma_at(sig)
        sides.append((sig2, a))
        inner = refl.h_at(X, a, sig)
        outer = refl.h_at(inner, sig, sig2)
        sides.append((outer, X))
    tag = refl.name or "reflection_map"
    return _identity_report(f"involutive/{tag}", sides, method, trials, rng_seed)


# ---------------------------------------------------------------------------
# numeric application
# ---------------------------------------------------------------------------

def apply_yb(ybm: YangBaxterMap, x: ProjPoint, y: ProjPoint, a_val, b_val):
    """(U, V) = (f, g) evaluated projectively at concrete points."""
    field = x.field
    f = ybm.f.map_field(field) if field is not ybm.f.field else ybm.f
    g = ybm.g.map_field(field) if field is not ybm.g.field else ybm.g
    binds = {SX: x, SY: y, SA: a_val, SB: b_val}
    return eval_projective(f, binds), eval_projective(g, binds)
