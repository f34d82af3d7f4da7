"""Fiberwise-linear Poisson structure on the dual bundle, flows, invariance checks.

Given structure functions, the bracket on functions of (x, xi) is fixed by
{xi_i, xi_j} = sum_k c_ij^k(x) xi_k and {xi_i, x_l} = (anchor)_{l i}(x).
The Hamiltonian field of a constant combination a of generators is the unique
polynomial field with H_a[xi_j] = ev_[a, e_j] and H_a[x_l] = rho(a)_l; both
identities are verifiable exactly.  Flows are fixed-step RK4 (deterministic),
and the invariance checks compare against exactly recomputed cone fibers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import algebra
from .expr import Polynomial, PolyVectorField
from .foliation import FoliationPresentation, MissingStructureFunctions, regular_data
from .grassmann import Curve
from .hncone import hn_fiber, hn_membership_distance


class NonFiniteState(RuntimeError):
    """The integrator produced a non-finite state (blow-up)."""


@dataclass(frozen=True)
class DualPoint:
    """A float point of the dual bundle: base x in R^n, covector xi in R^N."""

    x: tuple[float, ...]
    xi: tuple[float, ...]

    def __post_init__(self):
        if not all(np.isfinite(self.x)) or not all(np.isfinite(self.xi)):
            raise NonFiniteState("non-finite dual point")


# ---------------------------------------------------------------------------
# Combined polynomial functions on the dual bundle
# ---------------------------------------------------------------------------


def dual_vars(p: FoliationPresentation) -> tuple[str, ...]:
    fiber = tuple(f"xi{k+1}" for k in range(p.num_generators))
    clash = set(fiber) & set(p.vars)
    if clash:
        fiber = tuple(f"zeta{k+1}" for k in range(p.num_generators))
    return tuple(p.vars) + fiber


def promote_base(p: FoliationPresentation, f: Polynomial) -> Polynomial:
    """Lift a base polynomial to the dual bundle's variables (pullback)."""
    names = dual_vars(p)
    out = Polynomial.zero(names)
    pad = (0,) * p.num_generators
    for exp, c in f.terms.items():
        out = out + Polynomial.monomial(tuple(exp) + pad, c, names)
    return out


def ev(p: FoliationPresentation, a: Sequence) -> Polynomial:
    """The fiberwise-linear evaluation function of a constant combination a."""
    names = dual_vars(p)
    n = p.dim
    terms = {}
    for i, c in enumerate(a):
        c = Fraction(c)
        if c != 0:
            exp = [0] * len(names)
            exp[n + i] = 1
            terms[tuple(exp)] = c
    return Polynomial(names, terms)


def poisson_bracket(p: FoliationPresentation, f: Polynomial, g: Polynomial) -> Polynomial:
    """Exact bracket of two polynomial functions on the dual bundle."""
    if p.structure_functions is None:
        raise MissingStructureFunctions("Poisson bracket needs structure functions")
    names = dual_vars(p)
    if f.vars != names or g.vars != names:
        raise ValueError("arguments must live on the dual bundle's variables")
    n, big_n = p.dim, p.num_generators
    anchor = p.anchor()
    out = Polynomial.zero(names)
    df_xi = [f.diff(names[n + i]) for i in range(big_n)]
    dg_xi = [g.diff(names[n + j]) for j in range(big_n)]
    df_x = [f.diff(names[l]) for l in range(n)]
    dg_x = [g.diff(names[l]) for l in range(n)]
    for i in range(big_n):
        if df_xi[i].is_zero():
            continue
        for j in range(big_n):
            if dg_xi[j].is_zero():
                continue
            for k in range(big_n):
                c = p.structure_functions[i][j][k]
                if c.is_zero():
                    continue
                xi_k = Polynomial.var(names[n + k], names)
                out = out + promote_base(p, c) * xi_k * df_xi[i] * dg_xi[j]
    for i in range(big_n):
        for l in range(n):
            rho_li = anchor[l][i]
            if rho_li.is_zero():
                continue
            lifted = promote_base(p, rho_li)
            if not df_xi[i].is_zero() and not dg_x[l].is_zero():
                out = out + lifted * df_xi[i] * dg_x[l]
            if not df_x[l].is_zero() and not dg_xi[i].is_zero():
                out = out - lifted * df_x[l] * dg_xi[i]
    return out


# ---------------------------------------------------------------------------
# Hamiltonian fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HamiltonianField:
    """Base part rho(a) plus a fiber part linear in xi.

    fiber_matrix[j][k] is the coefficient of xi_k in d(xi_j)/dt.
    """

    presentation: FoliationPresentation
    combination: tuple[Fraction, ...]
    base: PolyVectorField
    fiber_matrix: tuple[tuple[Polynomial, ...], ...]

    def rhs_fn(self) -> Callable[[np.ndarray], np.ndarray]:
        n = self.presentation.dim
        big_n = self.presentation.num_generators
        base_fns = [c.as_float_fn() for c in self.base.components]
        fiber_fns = [[e.as_float_fn() for e in row] for row in self.fiber_matrix]

        def rhs(y: np.ndarray) -> np.ndarray:
            x = y[:n]
            xi = y[n:]
            out = np.empty(n + big_n)
            for l in range(n):
                out[l] = base_fns[l](x)
            for j in range(big_n):
                acc = 0.0
                for k in range(big_n):
                    coeff = fiber_fns[j][k](x)
                    if coeff:
                        acc += coeff * xi[k]
                out[n + j] = acc
            return out

        return rhs


def hamiltonian_field(p: FoliationPresentation, a) -> HamiltonianField:
    """Hamiltonian field of ev_a for a generator index or constant combination."""
    if p.structure_functions is None:
        raise MissingStructureFunctions("Hamiltonian fields need structure functions")
    if isinstance(a, int):
        combo = [Fraction(0)] * p.num_generators
        combo[a] = Fraction(1)
    else:
        combo = [Fraction(x) for x in a]
        if len(combo) != p.num_generators:
            raise ValueError("combination length must match the generator count")
    zero = Polynomial.zero(p.vars)
    base_comps = [zero] * p.dim
    for i, ci in enumerate(combo):
        if ci == 0:
            continue
        base_comps = [
            acc + ci * comp for acc, comp in zip(base_comps, p.generators[i].components)
        ]
    base = PolyVectorField(p.vars, tuple(base_comps))
    fiber = []
    for j in range(p.num_generators):
        row = [zero] * p.num_generators
        for i, ci in enumerate(combo):
            if ci == 0:
                continue
            for k in range(p.num_generators):
                c = p.structure_functions[i][j][k]
                if not c.is_zero():
                    row[k] = row[k] + ci * c
        fiber.append(tuple(row))
    return HamiltonianField(p, tuple(combo), base, tuple(fiber))


def hamiltonian_identity_defect(p: FoliationPresentation, h: HamiltonianField) -> list[str]:
    """Exact check of both defining identities; empty list when they hold.

    H_a[ev_{e_j}] must equal ev_[a, e_j] and H_a[x_l] must equal rho(a)_l,
    as polynomial identities on the dual bundle.
    """
    defects = []
    names = dual_vars(p)
    n, big_n = p.dim, p.num_generators

    def h_apply(f: Polynomial) -> Polynomial:
        out = Polynomial.zero(names)
        for l in range(n):
            df = f.diff(names[l])
            if not df.is_zero():
                out = out + promote_base(p, h.base.components[l]) * df
        for j in range(big_n):
            df = f.diff(names[n + j])
            if df.is_zero():
                continue
            phi_j = Polynomial.zero(names)
            for k in range(big_n):
                coeff = h.fiber_matrix[j][k]
                if not coeff.is_zero():
                    phi_j = phi_j + promote_base(p, coeff) * Polynomial.var(names[n + k], names)
            out = out + phi_j * df
        return out

    for j in range(big_n):
        e_j = [Fraction(0)] * big_n
        e_j[j] = Fraction(1)
        lhs = h_apply(ev(p, e_j))
        rhs = Polynomial.zero(names)
        for i, ci in enumerate(h.combination):
            if ci == 0:
                continue
            for k in range(big_n):
                c = p.structure_functions[i][j][k]
                if not c.is_zero():
                    rhs = rhs + ci * promote_base(p, c) * Polynomial.var(names[n + k], names)
        if lhs != rhs:
            defects.append(f"H[ev_e{j+1}] != ev_[a,e{j+1}]")
    for l in range(n):
        lhs = h_apply(promote_base(p, Polynomial.var(p.vars[l], p.vars)))
        rhs = promote_base(p, h.base.components[l])
        if lhs != rhs:
            defects.append(f"H[x_{l+1}] != rho(a)_{l+1}")
    return defects


# ---------------------------------------------------------------------------
# Flows
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (steps+1, dim)


def flow_rk4(rhs: Callable[[np.ndarray], np.ndarray], start: Sequence[float], t_final: float, steps: int) -> Trajectory:
    """Classical fixed-step RK4; raises NonFiniteState on blow-up."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    y = np.array([float(v) for v in start], dtype=float)
    h = t_final / steps
    times = np.linspace(0.0, t_final, steps + 1)
    states = np.empty((steps + 1, y.size))
    states[0] = y
    for s in range(steps):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * h * k1)
        k3 = rhs(y + 0.5 * h * k2)
        k4 = rhs(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise NonFiniteState(f"blow-up at step {s+1}")
        states[s + 1] = y
    return Trajectory(times, states)


def flow_hamiltonian(h: HamiltonianField, start: DualPoint, t_final: float, steps: int) -> Trajectory:
    y0 = list(start.x) + list(start.xi)
    return flow_rk4(h.rhs_fn(), y0, t_final, steps)


# ---------------------------------------------------------------------------
# Invariance checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InvarianceResult:
    max_drift: float
    snap_radius: float
    samples: int
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_drift <= self.tolerance


def _snap(value: float, denominator: int) -> Fraction:
    return Fraction(value).limit_denominator(denominator)


def hn_invariance_test(
    p: FoliationPresentation,
    m: Sequence,
    a,
    t_final: float,
    steps: int,
    *,
    eta: Sequence | None = None,
    tol: float = 1e-6,
    sample_count: int = 10,
    snap_denominator: int = 10**9,
) -> InvarianceResult:
    """Flow (x, xi) by H_a from xi0 = rho*_m eta and measure cone-membership drift.

    At sampled times the base point is snapped to a nearby rational point
    (must remain regular), the fiber there is recomputed exactly, and the
    distance from xi(t) to it is recorded; the snap radius is reported so it
    can be added to the drift budget.
    """
    point = tuple(Fraction(x) for x in m)
    r, is_regular = regular_data(p)
    if not is_regular(point):
        raise ValueError("invariance test must start at a regular point")
    if eta is None:
        eta = [Fraction(1)] * p.dim
    eta = [Fraction(x) for x in eta]
    xi0 = algebra.mat_vec(algebra.transpose(p.anchor_at(point)), eta)
    h = hamiltonian_field(p, a)
    start = DualPoint(tuple(float(x) for x in point), tuple(float(x) for x in xi0))
    traj = flow_hamiltonian(h, start, t_final, steps)
    n = p.dim
    idxs = np.unique(np.linspace(0, steps, sample_count + 1).astype(int))
    max_drift = 0.0
    max_snap = 0.0
    for s in idxs:
        state = traj.states[s]
        snapped = tuple(_snap(v, snap_denominator) for v in state[:n])
        snap_radius = float(np.linalg.norm(state[:n] - np.array([float(q) for q in snapped])))
        if not is_regular(snapped):
            from .grassmann import CurveNotGeneric

            raise CurveNotGeneric(f"snapped point {snapped} is not regular at time index {s}")
        fiber = hn_fiber(p, snapped, [Curve.constant(snapped)])
        drift = hn_membership_distance(fiber, state[n:])
        max_drift = max(max_drift, drift)
        max_snap = max(max_snap, snap_radius)
    return InvarianceResult(max_drift, max_snap, len(idxs), tol)


@dataclass(frozen=True)
class LiftResult:
    max_deviation: float
    steps: int
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance


def cotangent_lift_check(
    p: FoliationPresentation,
    m: Sequence,
    eta: Sequence,
    a,
    t_final: float,
    steps: int,
    *,
    tol: float = 1e-6,
) -> LiftResult:
    """Compare the H_a flow of rho*_m eta against the cotangent-lifted flow
    of rho(a) pushed through rho* at the transported base point."""
    point = tuple(Fraction(x) for x in m)
    eta_q = [Fraction(x) for x in eta]
    h = hamiltonian_field(p, a)
    xi0 = algebra.mat_vec(algebra.transpose(p.anchor_at(point)), eta_q)
    traj_h = flow_hamiltonian(
        h, DualPoint(tuple(float(x) for x in point), tuple(float(x) for x in xi0)), t_final, steps
    )

    n = p.dim
    base_fns = [c.as_float_fn() for c in h.base.components]
    jac_fns = [
        [h.base.components[l].diff(p.vars[mm]).as_float_fn() for mm in range(n)] for l in range(n)
    ]

    def lift_rhs(y: np.ndarray) -> np.ndarray:
        x = y[:n]
        cov = y[n:]
        out = np.empty(2 * n)
        for l in range(n):
            out[l] = base_fns[l](x)
        jac = np.array([[jac_fns[l][mm](x) for mm in range(n)] for l in range(n)])
        out[n:] = -jac.T @ cov
        return out

    y0 = [float(x) for x in point] + [float(x) for x in eta_q]
    traj_l = flow_rk4(lift_rhs, y0, t_final, steps)

    anchor = p.anchor()
    anchor_fns = [[e.as_float_fn() for e in row] for row in anchor]
    max_dev = 0.0
    for s in range(steps + 1):
        xi_h = traj_h.states[s][n:]
        x_l = traj_l.states[s][:n]
        cov = traj_l.states[s][n:]
        rho_t = np.array([[anchor_fns[l][j](x_l) for j in range(p.num_generators)] for l in range(n)])
        xi_lift = rho_t.T @ cov
        max_dev = max(max_dev, float(np.linalg.norm(xi_h - xi_lift)))
    return LiftResult(max_dev, steps, tol)
