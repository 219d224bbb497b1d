"""Adjoint equations and nonlinear self-adjointness.

The formal Lagrangian of an evolution equation F = 0 is L = v*F with a
fresh dependent variable v.  The adjoint equation is F* = delta L / delta u.
An equation is nonlinearly self-adjoint when some substitution v = phi(x,t,u)
turns F* into a multiple of F; matching the u_t coefficient forces the
multiplier to be -phi_u, so the check is a single identity in the jet
variables, with no search.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .atoms import Jet, UnknownFn
from .calculus import (
    Equation,
    euler,
    partial_coord,
    substitute_dependent,
)
from .errors import SubstitutionError, UnsupportedInputError
from .expr import DiffExpr, Monomial, as_expr, equal, jet, primitive_normal, unknown


def formal_lagrangian(eq: Equation) -> DiffExpr:
    """L = v * lhs for a u-equation."""
    if eq.dep != "u":
        raise UnsupportedInputError("formal Lagrangian is defined for u-equations")
    return jet("v") * eq.lhs


def adjoint_equation(eq: Equation) -> DiffExpr:
    """Left side F* of the adjoint equation F* = 0."""
    return euler(formal_lagrangian(eq), "u")


def adjoint_system(eq: Equation) -> tuple[Equation, Equation]:
    """The pair (F = 0, F* = 0) with F* solved for v_t.

    F* always carries -v_t, so -F* is a valid evolution equation in v; the
    pair is what conserved vectors of the formal Lagrangian vanish against.
    """
    fstar = adjoint_equation(eq)
    return eq, Equation(-fstar, dep="v")


@dataclass(frozen=True)
class Substitution:
    """A concrete substitution v = phi(x, t, u)."""

    phi: DiffExpr

    def __post_init__(self):
        phi = as_expr(self.phi)
        object.__setattr__(self, "phi", phi)
        if phi.is_zero:
            raise SubstitutionError("phi = 0 is excluded")
        for atom in phi.atoms():
            if isinstance(atom, Jet) and (atom.dep != "u" or atom.order() != 0):
                raise SubstitutionError(
                    f"phi may depend on x, t, u only (found {atom})"
                )
            if isinstance(atom, UnknownFn):
                raise SubstitutionError("phi must be a concrete expression")

    def __str__(self) -> str:
        return f"phi = {self.phi}"


class Classification(str, enum.Enum):
    STRICT = "strict"
    QUASI = "quasi"
    WEAK = "weak"
    NONLINEAR = "nonlinear"

    def __str__(self) -> str:  # pragma: no cover
        return self.value


def classify_substitution(sub: Substitution) -> Classification:
    """Classify a verified substitution.

    strict: phi is exactly u; quasi: phi depends on u alone with phi_u
    nonzero; weak: phi_u nonzero together with explicit x or t dependence;
    nonlinear: everything else (in particular phi_u = 0).
    """
    phi = sub.phi
    if equal(phi, jet("u")):
        return Classification.STRICT
    phi_u = partial_coord(phi, "u")
    phi_x = partial_coord(phi, "x")
    phi_t = partial_coord(phi, "t")
    if not phi_u.is_zero:
        if phi_x.is_zero and phi_t.is_zero:
            return Classification.QUASI
        return Classification.WEAK
    return Classification.NONLINEAR


@dataclass(frozen=True)
class NsaReport:
    """Outcome of a self-adjointness check under the forced multiplier."""

    holds: bool
    multiplier: DiffExpr
    residual: DiffExpr
    classification: Optional[Classification]
    nonzero_partials: tuple[str, ...]

    def __str__(self) -> str:
        verdict = "holds" if self.holds else "fails"
        extra = f" [{self.classification.value}]" if self.classification else ""
        return f"nonlinear self-adjointness {verdict}{extra}"


def nsa_check(eq: Equation, sub: Substitution) -> NsaReport:
    """Decide F*|_{v=phi} = lambda*F with lambda = -phi_u.

    The identity is required in all jet variables, not merely on solutions.
    A failure under this forced multiplier refutes the particular phi, not
    the equation's self-adjointness through other substitutions.
    """
    phi = sub.phi
    lam = -partial_coord(phi, "u")
    fstar = adjoint_equation(eq)
    residual = substitute_dependent(fstar, "v", phi) - lam * eq.lhs
    holds = residual.is_zero
    partials = tuple(
        name
        for name in ("x", "t", "u")
        if not partial_coord(phi, name).is_zero
    )
    return NsaReport(
        holds=holds,
        multiplier=lam,
        residual=residual,
        classification=classify_substitution(sub) if holds else None,
        nonzero_partials=partials,
    )


def determining_system_detailed(
    eq: Equation, name: str = "phi"
) -> list[tuple[Monomial, DiffExpr]]:
    """Keyed determining equations for an undetermined phi(x, t, u).

    Expands F*|_{v=phi} + phi_u*F and collects over every monomial in the
    derivative jets of u (u_t included); each coefficient, scaled to
    primitive integer form, must vanish.  The u_t coefficient cancels
    identically, which is exactly why the multiplier is forced.
    """
    phi0 = unknown(name)
    fstar = adjoint_equation(eq)
    residual = substitute_dependent(fstar, "v", phi0) + unknown(name, u=1) * eq.lhs
    selected = {j for j in residual.jets("u") if j.order() >= 1}
    return [
        (key, primitive_normal(coeff))
        for key, coeff in residual.collect(selected)
    ]


def determining_system(eq: Equation, name: str = "phi") -> list[DiffExpr]:
    """Determining equations, deduplicated and deterministically ordered."""
    seen = set()
    out = []
    for _key, coeff in determining_system_detailed(eq, name):
        if coeff not in seen:
            seen.add(coeff)
            out.append(coeff)
    return out
