"""Admissible functions and implicit Hamiltonian systems (X_f, df) in D."""
from __future__ import annotations

from dataclasses import dataclass

from . import linalg
from .actions import GroupAction, average, is_invariant
from .calculus import Section, VectorField, exterior_derivative_fn
from .dirac import gauge_distribution
from .distributions import Distribution, membership_generic
from .errors import MembershipFailure, NotInvariant
from .exprcore import RatFn
from .reduction import QuotientMap, ReducedDirac, StratumChart, pushforward_function, pushforward_vf, restrict_to_stratum


@dataclass
class HamiltonianSolution:
    f: RatFn
    xf: VectorField
    gauge: Distribution
    coefficients: tuple

    @property
    def section(self) -> Section:
        return Section(self.xf, exterior_derivative_fn(self.f))


@dataclass(frozen=True)
class NotAdmissible:
    """df is not in the one-form image of D; ``residual`` is the failing equation."""

    f: RatFn
    residual: RatFn

    def __bool__(self):
        return False

    def __str__(self):
        return f"{self.f} is not admissible (residual {self.residual})"


def solve_admissible(f: RatFn, d):
    """Solve sum c_i sigma_i = (X, df): one-form rows first, then read off X.

    ``d`` is anything with ``chart`` and ``generators`` (a DiracStructure or a
    ReducedDirac).  Free coefficients are set to zero.
    """
    chart = d.chart
    gens = list(d.generators)
    df = exterior_derivative_fn(f)
    cols = [list(g.alpha.components) for g in gens]
    coeffs, bad = linalg.solve_generic(cols, list(df.components), chart)
    if coeffs is None:
        return NotAdmissible(f, bad[1])
    xf = VectorField.zero(chart)
    for c, g in zip(coeffs, gens):
        if not c.is_zero():
            xf = xf + g.x * c
    sol = HamiltonianSolution(f, xf, gauge_distribution(d), tuple(coeffs))
    if not membership_generic(sol.section, Distribution.pontryagin(chart, gens)):
        raise MembershipFailure(f"solution for {f} failed the membership re-check")
    return sol


def invariant_hamiltonian(f: RatFn, d, a: GroupAction):
    """Admissible solution with X_f replaced by its Haar average."""
    cert = is_invariant(f, a)
    if not cert:
        raise NotInvariant(f"{f} is not invariant: residual {cert.residuals[0][1]}")
    sol = solve_admissible(f, d)
    if not sol:
        return sol
    xf = average(sol.xf, a)
    if xf == sol.xf:
        return sol
    avg = HamiltonianSolution(f, xf, sol.gauge, ())
    w = membership_generic(avg.section, Distribution.pontryagin(d.chart, d.generators))
    if not w:
        raise MembershipFailure(f"averaged X_f for {f} left D: {w}")
    return HamiltonianSolution(f, xf, sol.gauge, w.coefficients)


@dataclass
class ReducedHamiltonian:
    section: Section
    witness: object


def reduce_hamiltonian(sol: HamiltonianSolution, q: QuotientMap, st: StratumChart,
                       reduced: ReducedDirac, bound: int = 4) -> ReducedHamiltonian:
    """(X_P, d f_P) on the stratum, certified to lie in the reduced structure."""
    xbar = pushforward_vf(sol.xf, q, bound)
    fbar = pushforward_function(sol.f, q, bound)
    empty = exterior_derivative_fn(fbar) * 0
    down = restrict_to_stratum(Section(xbar, empty), st)
    fp = st.embed(fbar)
    s = Section(down.x, exterior_derivative_fn(fp))
    w = reduced.contains(s)
    if not w:
        raise MembershipFailure(f"reduced Hamiltonian section {s} is not in the reduced structure: {w}")
    return ReducedHamiltonian(s, w)
