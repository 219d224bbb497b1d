"""Conserved vectors: construction, localization, normalization, checking."""

from fractions import Fraction

import pytest

from nsakit import (
    ConservedVector,
    DiffExpr,
    Equation,
    PointSymmetry,
    Substitution,
    UnverifiedSubstitutionWarning,
    adjoint_system,
    density_normalize,
    ibragimov_vector,
    is_trivial,
    ln,
    localize,
    total_derivative,
    verify_divergence,
)
from nsakit.atoms import IndepVar, Jet
from nsakit.errors import UnsupportedInputError

T = DiffExpr.from_atom(IndepVar("t"))
X = DiffExpr.from_atom(IndepVar("x"))
U = DiffExpr.from_atom(Jet("u"))
U_X = DiffExpr.from_atom(Jet("u", 0, 1))
U_XX = DiffExpr.from_atom(Jet("u", 0, 2))
U_XXX = DiffExpr.from_atom(Jet("u", 0, 3))
V = DiffExpr.from_atom(Jet("v"))


def scaling_equation():
    # u_t + u*u_xxx + t*u^2*u_x admits t*d_t - u*d_u
    return Equation(
        DiffExpr.from_atom(Jet("u", 1, 0)) + U * U_XXX + T * U**2 * U_X
    )


def scaling_symmetry():
    return PointSymmetry(T, DiffExpr.zero(), -U, name="scaling")


def test_raw_vector_density_oracle():
    """tau*L + w*dL/du_t with L = v*F and w = -u - t*u_t.

    C0 = t*v*F + (-u - t*u_t)*v collapses on expansion to
    v*(t*u*u_xxx + t^2*u^2*u_x - u): the t*u_t terms cancel exactly.
    """
    cv = ibragimov_vector(scaling_equation(), scaling_symmetry())
    expected = V * (T * U * U_XXX + T**2 * U**2 * U_X - U)
    assert cv.c0 == expected


def test_raw_vector_flux_oracle():
    """Third-order flux bracket for x-translation on u_t + u*u_xxx.

    With w = -u_x: C1 = w*(D_x^2 dL/du_xxx) - D_x w*(D_x dL/du_xxx)
    + D_x^2 w*dL/du_xxx, dL/du_xxx = u*v. Expanding by hand gives
    v*u_t + u*u_xx*v_x - u*u_x*v_xx - 2*u_x^2*v_x after replacing
    -u_x*D_x^2(uv) + ... term by term.
    """
    eq = Equation(DiffExpr.from_atom(Jet("u", 1, 0)) + U * U_XXX)
    shift = PointSymmetry(DiffExpr.zero(), DiffExpr.one(), DiffExpr.zero())
    cv = ibragimov_vector(eq, shift)
    v_x = DiffExpr.from_atom(Jet("v", 0, 1))
    v_xx = DiffExpr.from_atom(Jet("v", 0, 2))
    v_t = DiffExpr.from_atom(Jet("v", 1, 0))
    expected = V * DiffExpr.from_atom(Jet("u", 1, 0)) + U * U_XX * v_x \
        - U * U_X * v_xx - 2 * U_X**2 * v_x
    assert cv.c1 == expected
    assert cv.c0 == -V * U_X
    assert not v_t.is_zero


def test_raw_vector_satisfies_divergence_on_the_system():
    eq = scaling_equation()
    cv = ibragimov_vector(eq, scaling_symmetry())
    system = list(adjoint_system(eq))
    assert verify_divergence(cv, system).is_zero


def test_localization_requires_verified_substitution():
    eq = scaling_equation()
    cv = ibragimov_vector(eq, scaling_symmetry())
    good = localize(cv, Substitution(DiffExpr.one()))
    assert good.c0 == T * U * U_XXX + T**2 * U**2 * U_X - U
    assert good.provenance.substitution is not None

    bad = Substitution(U)
    with pytest.raises(UnsupportedInputError):
        localize(cv, bad)
    with pytest.warns(UnverifiedSubstitutionWarning):
        forced = localize(cv, bad, allow_unverified=True)
    assert not verify_divergence(forced, eq).is_zero


def test_localized_vector_is_conserved_on_the_single_equation():
    eq = scaling_equation()
    cv = localize(
        ibragimov_vector(eq, scaling_symmetry()), Substitution(DiffExpr.one())
    )
    assert verify_divergence(cv, eq).is_zero


def test_density_normalize_strips_total_x_derivatives():
    eq = scaling_equation()
    cv = localize(
        ibragimov_vector(eq, scaling_symmetry()), Substitution(DiffExpr.one())
    )
    norm = density_normalize(cv, eq)
    # density u; flux t*u^3/3 + u*u_xx - u_x^2/2
    assert norm.c0 == U
    assert norm.c1 == Fraction(1, 3) * T * U**3 + U * U_XX \
        - Fraction(1, 2) * U_X**2
    assert verify_divergence(norm, eq).is_zero
    assert norm.provenance.sign == -1


def test_density_normalize_transfer_identity():
    eq = scaling_equation()
    cv = localize(
        ibragimov_vector(eq, scaling_symmetry()), Substitution(DiffExpr.one())
    )
    norm = density_normalize(cv, eq)
    moved = norm.provenance.sign * cv.c0 - norm.c0
    assert moved == total_derivative(norm.provenance.transfer, "x")
    assert norm.provenance.sign * cv.c1 - norm.c1 == -total_derivative(
        norm.provenance.transfer, "t"
    )


def test_density_normalize_logarithm_branch():
    # localizing x-translation by x*u^-1 leaves density -u_x/u - ...;
    # the u_x*u^-1 term integrates to ln u
    eq = Equation(DiffExpr.from_atom(Jet("u", 1, 0)) + U * U_XXX)
    raw = ibragimov_vector(
        eq, PointSymmetry(DiffExpr.zero(), DiffExpr.one(), DiffExpr.zero())
    )
    local = localize(raw, Substitution(X * U**-1))
    norm = density_normalize(local, eq)
    assert norm.c0 == ln(U)
    assert norm.c1 == U_XX
    assert verify_divergence(norm, eq).is_zero


def test_density_normalize_power_branch():
    # a D_x(u_x^3/3) summand in the density moves wholly into the flux
    eq = Equation(DiffExpr.from_atom(Jet("u", 1, 0)) + U_XXX)
    h = U_X**3 / 3
    cv = ConservedVector(
        U + total_derivative(h, "x"),
        U_XX - total_derivative(h, "t"),
    )
    norm = density_normalize(cv, eq)
    assert norm.c0 == U
    assert norm.c1 == U_XX
    assert norm.provenance.transfer == h
    assert norm.provenance.sign == 1
    assert verify_divergence(norm, eq).is_zero


def test_verify_divergence_reports_residuals():
    eq = scaling_equation()
    wrong = ConservedVector(U, U**2)
    resid = verify_divergence(wrong, eq)
    assert not resid.is_zero


def test_localization_is_linear_in_the_substitution():
    """Scaling phi by a nonzero rational scales both components."""
    eq = scaling_equation()
    raw = ibragimov_vector(eq, scaling_symmetry())
    base = localize(raw, Substitution(DiffExpr.one()))
    scaled = localize(raw, Substitution(DiffExpr.number(Fraction(3, 7))))
    assert scaled.c0 == Fraction(3, 7) * base.c0
    assert scaled.c1 == Fraction(3, 7) * base.c1


def test_divergence_residual_survives_normalization():
    """Normalization changes the residual only by the recorded sign."""
    eq = Equation(DiffExpr.from_atom(Jet("u", 1, 0)) + U_XXX)
    unconserved = ConservedVector(U * U_XX, DiffExpr.zero())
    norm = density_normalize(unconserved, eq)
    assert norm.c0 == U_X**2
    assert norm.provenance.sign == -1
    before = verify_divergence(unconserved, eq)
    after = verify_divergence(norm, eq)
    assert not before.is_zero
    assert after == norm.provenance.sign * before


def test_is_trivial():
    eq = Equation(DiffExpr.from_atom(Jet("u", 1, 0)) + U * U_XXX)
    # a density that is a total x-derivative on solutions is trivial
    h = U * U_X
    cv = ConservedVector(
        total_derivative(h, "x"), -total_derivative(h, "t")
    )
    assert is_trivial(cv, eq)
    real = density_normalize(
        localize(
            ibragimov_vector(
                scaling_equation(), scaling_symmetry()
            ),
            Substitution(DiffExpr.one()),
        ),
        scaling_equation(),
    )
    assert not is_trivial(real, scaling_equation())


def test_flux_order_cap():
    sixth = Equation(
        DiffExpr.from_atom(Jet("u", 1, 0)) + DiffExpr.from_atom(Jet("u", 0, 6))
    )
    shift = PointSymmetry(DiffExpr.zero(), DiffExpr.one(), DiffExpr.zero())
    with pytest.raises(UnsupportedInputError, match="x-order up to 5"):
        ibragimov_vector(sixth, shift)
