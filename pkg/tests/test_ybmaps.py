from fractions import Fraction

import pytest

from reflectomap.algebra import (
    IndeterminatePoint,
    ProjPoint,
    RationalFunction,
    rf_equal_exact,
    symbol,
)
from reflectomap.ybmaps import (
    FAMILIES,
    NotASymmetry,
    ReflectionMap,
    SymmetryMap,
    UnknownFamily,
    YangBaxterMap,
    apply_yb,
    builtin_family,
    check_involutive_reflection,
    check_pi_symmetry,
    check_reflection,
    check_reversibility,
    check_yang_baxter,
    identity_reflection,
    normalize_family,
    symmetry_conjugate,
)

rf = RationalFunction.variable
x, y, a, b, mu = (rf(symbol(n)) for n in ("X", "Y", "a", "b", "mu"))
s_a = rf(symbol("s_a"))


def table2_f3():
    return ReflectionMap(h=-a * x / mu, sigma=mu * mu / a, name="table2_f3")


def table2_f4():
    return ReflectionMap(h=x - a + mu, sigma=-a + 2 * mu, name="table2_f4")


# ---------------------------------------------------------------------------
# built-in families
# ---------------------------------------------------------------------------

def test_family_tags():
    assert normalize_family("F3") == "F_III"
    assert normalize_family("f_iv") == "F_IV"
    assert normalize_family("FI") == "F_I"
    with pytest.raises(UnknownFamily):
        normalize_family("F6")
    with pytest.raises(UnknownFamily):
        normalize_family("H3")


def test_builtin_f3_formulas():
    m = builtin_family("F_III")
    P = (a * x - b * y) / (x - y)
    assert rf_equal_exact(m.f, (y / a) * P)
    assert rf_equal_exact(m.g, (x / b) * P)


def test_builtin_f5_formulas():
    m = builtin_family("F_V")
    P = (a - b) / (x - y)
    assert rf_equal_exact(m.f, y + P)
    assert rf_equal_exact(m.g, x + P)


def test_builtin_f4_formulas():
    m = builtin_family("F_IV")
    P = 1 + (b - a) / (x - y)
    assert rf_equal_exact(m.f, y * P)
    assert rf_equal_exact(m.g, x * P)


def test_builtin_f1_f2_formulas():
    m1 = builtin_family("F_I")
    P1 = ((1 - b) * x + b - a + (a - 1) * y) / (
        b * (1 - a) * x + (a - b) * x * y + a * (b - 1) * y
    )
    assert rf_equal_exact(m1.f, a * y * P1)
    assert rf_equal_exact(m1.g, b * x * P1)
    m2 = builtin_family("F_II")
    P2 = (a * x - b * y + b - a) / (x - y)
    assert rf_equal_exact(m2.f, (y / a) * P2)
    assert rf_equal_exact(m2.g, (x / b) * P2)


# ---------------------------------------------------------------------------
# numeric application
# ---------------------------------------------------------------------------

def test_apply_f3_point():
    m = builtin_family("F_III")
    u, v = apply_yb(m, ProjPoint.finite(2), ProjPoint.finite(3), 1, 2)
    assert u.value() == 12 and v.value() == 4


def test_apply_f5_point():
    m = builtin_family("F_V")
    u, v = apply_yb(m, ProjPoint.finite(3), ProjPoint.finite(1), 5, 1)
    assert (u.value(), v.value()) == (3, 5)


def test_apply_f4_singular_locus():
    m = builtin_family("F_IV")
    # X = Y lies on the kernel's polar locus: the image is (inf, inf)
    u, v = apply_yb(m, ProjPoint.finite(2), ProjPoint.finite(2), 1, 3)
    assert u.is_infinity() and v.is_infinity()
    # a true base point (numerator and denominator both vanish) raises
    with pytest.raises(IndeterminatePoint):
        apply_yb(m, ProjPoint.finite(2), ProjPoint.finite(2), 1, 1)


def test_reversibility_numeric_spot_check():
    # R21(2,1) applied to (12, 4): site2 <- f_{2,1}(4, 12), site1 <- g_{2,1}(4, 12)
    m = builtin_family("F_III")
    f_val, g_val = apply_yb(m, ProjPoint.finite(4), ProjPoint.finite(12), 2, 1)
    assert g_val.value() == 2 and f_val.value() == 3


# ---------------------------------------------------------------------------
# defining identities
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("fam", FAMILIES)
def test_family_yang_baxter_exact(fam):
    assert check_yang_baxter(builtin_family(fam)).passed


@pytest.mark.parametrize("fam", FAMILIES)
def test_family_reversibility_exact(fam):
    assert check_reversibility(builtin_family(fam)).passed


@pytest.mark.parametrize("fam", FAMILIES)
def test_family_pi_symmetry_exact(fam):
    assert check_pi_symmetry(builtin_family(fam)).passed


@pytest.mark.parametrize("fam", FAMILIES)
def test_family_yang_baxter_randomized_screen(fam):
    r = check_yang_baxter(builtin_family(fam), method="randomized", trials=100, rng_seed=2)
    assert r.passed


def test_perturbed_map_fails_with_witness():
    m = builtin_family("F_III")
    bad = YangBaxterMap(m.f, m.g + 1, family_id="perturbed")
    r = check_yang_baxter(bad, method="randomized", trials=10, rng_seed=4)
    assert not r.passed
    assert r.witness is not None and "point" in r.witness
    assert not check_yang_baxter(bad).passed


def test_identity_map_reversible():
    ident = YangBaxterMap(x, y, family_id="identity")
    assert check_reversibility(ident).passed


def test_pi_symmetry_failure():
    asym = YangBaxterMap(x, x, family_id="asym")
    assert not check_pi_symmetry(asym).passed


# ---------------------------------------------------------------------------
# symmetry conjugation
# ---------------------------------------------------------------------------

def test_conjugate_by_identity_is_identity():
    s = SymmetryMap(x, name="id")
    m = builtin_family("F_III")
    conj = symmetry_conjugate(m, s)
    assert conj.f.num == m.f.num and conj.f.den == m.f.den
    assert conj.g.num == m.g.num and conj.g.den == m.g.den


def test_conjugate_f5_negation():
    # s(X) = -X is an involutive symmetry of F_V; the conjugate is again a
    # Yang-Baxter map and has the same reflection maps.
    s = SymmetryMap(-x, name="neg")
    m = builtin_family("F_V")
    conj = symmetry_conjugate(m, s)
    assert check_yang_baxter(conj).passed
    refl = identity_reflection()
    assert check_reflection(m, refl).passed == check_reflection(conj, refl).passed
    free_row = ReflectionMap(h=x, sigma=None, name="table3_f5")
    assert (
        check_reflection(m, free_row).passed
        == check_reflection(conj, free_row).passed
        is True
    )


def test_not_a_symmetry_raises():
    s = SymmetryMap(-x, name="neg")
    with pytest.raises(NotASymmetry):
        symmetry_conjugate(builtin_family("F_IV"), s)


def test_symmetry_must_be_involutive():
    with pytest.raises(ValueError):
        SymmetryMap(x + 1)


# ---------------------------------------------------------------------------
# reflection maps
# ---------------------------------------------------------------------------

def test_reflection_f3_table2():
    assert check_reflection(builtin_family("F_III"), table2_f3()).passed


def test_reflection_f4_table2():
    assert check_reflection(builtin_family("F_IV"), table2_f4()).passed


def test_reflection_sign_flip_is_the_mu_negated_solution():
    # h = +aX/mu together with sigma = mu^2/a is the mu -> -mu member of the
    # same classified family (sigma is even in mu), hence itself an exact
    # solution of the reflection equation.  A genuinely corrupted map fails.
    m = builtin_family("F_III")
    flipped = ReflectionMap(h=a * x / mu, sigma=mu * mu / a, name="flipped")
    assert check_reflection(m, flipped).passed
    corrupt = ReflectionMap(h=a * x / mu + 1, sigma=mu * mu / a, name="corrupt")
    r = check_reflection(m, corrupt)
    assert not r.passed
    rr = check_reflection(m, corrupt, method="randomized", trials=10, rng_seed=0)
    assert not rr.passed and rr.witness is not None


def test_identity_reflection_all_families():
    for fam in FAMILIES:
        assert check_reflection(builtin_family(fam), identity_reflection()).passed


def test_involutive_reflection_examples():
    assert check_involutive_reflection(table2_f3()).passed
    assert check_involutive_reflection(identity_reflection()).passed
    # F_IV phi-column used as h under duality
    dual = ReflectionMap(h=-x, sigma=-a + 2 * mu, name="table2_f4_dual")
    assert check_involutive_reflection(dual).passed


def test_involutive_reflection_failure():
    r = check_involutive_reflection(ReflectionMap(h=x + 1, sigma=a, name="shift"))
    assert not r.passed


def test_free_sigma_reflection_is_checked_in_enlarged_ring():
    m = builtin_family("F_I")
    row = ReflectionMap(h=(s_a / a) * x, sigma=None, name="table3_f1_r3")
    assert check_reflection(m, row).passed
    # and numerically for a concrete random Moebius involution
    sig = (3 * a + 5) / (2 * a - 3)
    concrete = row.resolve_sigma(sig, name="resolved")
    assert check_reflection(m, concrete, method="randomized", trials=20, rng_seed=7).passed


def test_reflection_map_must_be_mobius():
    with pytest.raises(ValueError):
        ReflectionMap(h=x * x, sigma=a)
    with pytest.raises(ValueError):
        ReflectionMap(h=(2 * x + 2) / (x + 1), sigma=a)  # proportional rows


def test_check_report_shape():
    r = check_pi_symmetry(builtin_family("F_II"))
    d = r.to_json()
    assert d["status"] == "pass" and d["method"] == "exact"
    assert "seconds" not in d  # reports are byte-reproducible
    assert r.seconds >= 0
