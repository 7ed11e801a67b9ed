"""Quasi-static nutrient profile on the rescaled unit ball.

At frozen log-radius z the nutrient concentration solves the two-point
boundary value problem

    c''(r) + (2/r) c'(r) = e^{2z} F(c(r)),   c'(0) = 0,  c(1) = 1,

discretized with second-order central differences.  At r = 0 the operator
is replaced by its symmetric limit 3 c''(0) (ghost-node symmetry), which
the uniform grid resolves to 6 (c_1 - c_0) / h^2.  A damped Newton
iteration with the analytic Jacobian solves the nonlinear system; the
sensitivity dc/dz comes from one extra linear solve with the converged
Jacobian, since it satisfies the linearized problem

    u'' + (2/r) u' = e^{2z} F'(c) u + 2 e^{2z} F(c),  u'(0) = 0, u(1) = 0.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .errors import ConvergenceError, DomainError
from .grid import Grid
from .rates import check_domain

_MACHEPS = np.finfo(float).eps


def operator_rows(grid, beta=0.0):
    """Tridiagonal rows of L[c] = c_rr + (2/r + beta*r) c_r.

    Row 0 encodes the symmetric-limit stencil 6(c_1 - c_0)/h^2 (the
    beta*r term vanishes at r = 0); the last row is an identity row for a
    strongly imposed Dirichlet value.  Returns (lower, diag, upper) with
    the scipy banded-storage convention handled by :func:`tri_solve`.
    """
    r, h, n = grid.r, grid.h, grid.n
    lo = np.zeros(n)
    di = np.zeros(n)
    up = np.zeros(n)
    di[0] = -6.0 / h**2
    up[0] = 6.0 / h**2
    a = 2.0 / r[1:-1] + beta * r[1:-1]
    lo[1:-1] = 1.0 / h**2 - a / (2.0 * h)
    di[1:-1] = -2.0 / h**2
    up[1:-1] = 1.0 / h**2 + a / (2.0 * h)
    di[-1] = 1.0
    return lo, di, up


def tri_solve(lo, di, up, rhs):
    """Direct solve of the tridiagonal system given by row arrays."""
    n = di.size
    ab = np.zeros((3, n))
    ab[0, 1:] = up[:-1]
    ab[1, :] = di
    ab[2, :-1] = lo[1:]
    return solve_banded((1, 1), ab, rhs)


def tri_apply(lo, di, up, x):
    y = di * x
    y[:-1] += up[:-1] * x[1:]
    y[1:] += lo[1:] * x[:-1]
    return y


@dataclass
class NutrientProfile:
    """Converged profile c(.; z) with its radial and z sensitivities."""

    z: float
    c: np.ndarray
    c_r: np.ndarray
    c_z: np.ndarray
    grid: Grid
    residual: float
    iterations: int


def _resid_floor(grid, scale):
    # max-norm residual below this is indistinguishable from rounding
    return 50.0 * _MACHEPS * max(1.0, 1.0 / grid.h**2, scale)


def solve_nutrient(model, z, grid, tol=1e-10, guess=None, max_iter=60):
    """Solve the nutrient BVP at log-radius ``z``.

    Parameters
    ----------
    model : RateModel
    z : float
        Log-radius; the consumption term scales with e^{2z}.
    grid : Grid
    tol : float
        Relative bound on the max-norm nonlinear residual.  The effective
        absolute bound is ``tol * max(1, e^{2z} F(c_hi))``, floored at the
        rounding level of the h^-2 stencil.
    guess : array, optional
        Warm-start iterate (e.g. the profile at a nearby z); defaults to
        the constant boundary value 1.
    max_iter : int
        Newton iteration cap.

    Raises
    ------
    ConvergenceError
        If damped Newton cannot reach the tolerance within ``max_iter``.
    """
    z = float(z)
    e2z = np.exp(2.0 * z)
    fhi, _ = model.F(np.array(model.c_hi))
    scale = max(1.0, e2z * abs(float(fhi)))
    tol_eff = max(tol * scale, _resid_floor(grid, e2z * abs(float(fhi))))

    lo, di, up = operator_rows(grid)
    c = np.ones(grid.n) if guess is None else np.array(guess, dtype=float)
    c[-1] = 1.0

    def residual(c):
        # domain check keeps overshooting Newton trials inside the rates'
        # validity margin; the line search treats violations as rejections
        fv, _ = model.F(check_domain(model, c, "nutrient solve"))
        R = tri_apply(lo, di, up, c)
        R[:-1] -= e2z * fv[:-1]
        R[-1] = c[-1] - 1.0
        return R

    R = residual(c)
    rnorm = np.max(np.abs(R))
    it = 0
    while rnorm > tol_eff:
        if it >= max_iter:
            raise ConvergenceError(
                f"nutrient BVP Newton stalled at z={z:g}: residual {rnorm:.3e} "
                f"(target {tol_eff:.3e})", residual=rnorm)
        _, dfv = model.F(c)
        j_di = di.copy()
        j_di[:-1] -= e2z * dfv[:-1]
        delta = tri_solve(lo, j_di, up, -R)
        alpha = 1.0
        while True:
            try:
                R_new = residual(c + alpha * delta)
                new_norm = np.max(np.abs(R_new))
            except DomainError:
                new_norm = np.inf
            if new_norm <= (1.0 - 0.5 * alpha) * rnorm or new_norm <= tol_eff:
                c = c + alpha * delta
                R, rnorm = R_new, new_norm
                break
            alpha *= 0.5
            if alpha < 1e-8:
                raise ConvergenceError(
                    f"nutrient BVP line search stalled at z={z:g}: "
                    f"residual {rnorm:.3e}", residual=rnorm)
        it += 1

    # sensitivity dc/dz from the converged Jacobian
    _, dfv = model.F(c)
    fv, _ = model.F(c)
    j_di = di.copy()
    j_di[:-1] -= e2z * dfv[:-1]
    rhs = np.zeros(grid.n)
    rhs[:-1] = 2.0 * e2z * fv[:-1]
    c_z = tri_solve(lo, j_di, up, rhs)

    c_r = grid.derivative(c, symmetric_origin=True)
    return NutrientProfile(z=z, c=c, c_r=c_r, c_z=c_z, grid=grid,
                           residual=float(rnorm), iterations=it)


def flux_residual(profile, model):
    """Max-norm defect of the integrated flux identity.

    Integrating the BVP once gives c'(r) = e^{2z} r^-2 * int_0^r F(c) rho^2
    d rho; the returned residual compares the differentiated profile
    against the quadrature of the right-hand side and is O(h^2) for a
    converged profile.
    """
    grid = profile.grid
    e2z = np.exp(2.0 * profile.z)
    fv, _ = model.F(profile.c)
    integral = grid.cumulative_radial_integral(fv)
    rhs = np.zeros(grid.n)
    rhs[1:] = e2z * integral[1:] / grid.r[1:] ** 2
    return float(np.max(np.abs(profile.c_r - rhs)))


# The seven proven envelope bounds on the profile and its derivatives.
# Bounds 5 and 7 state the same inequality; both are checked as listed.
BOUND_NAMES = (
    "B1: 0 < c <= 1",
    "B2: c_r >= 0",
    "B3: c_z <= 0",
    "B4: c_r <= r F(1) e^{2z} / 3",
    "B5: c_z >= -(1 - r^2) F(1) e^{2z} / 3",
    "B6: -2 F(1) e^{2z} / 3 <= c_rr <= F(1) e^{2z}",
    "B7: c_z >= -(1 - r^2) F(1) e^{2z} / 3",
)


@dataclass
class BoundsEntry:
    z: float
    name: str
    margin: float  # worst signed relative margin over the grid
    passed: bool


@dataclass
class BoundsReport:
    entries: list
    rel_tol: float

    @property
    def all_passed(self):
        return all(e.passed for e in self.entries)

    def lines(self):
        out = []
        for e in self.entries:
            status = "pass" if e.passed else "FAIL"
            out.append(f"z={e.z:+.3f}  {e.name}: {status}  margin {e.margin:+.3e}")
        return out


def bounds_report(model, z_values, grid, rel_tol=1e-8, tol=1e-10):
    """Check the seven envelope bounds at each requested z.

    Margins are normalized by F(1) e^{2z} (or 1 where that scale
    degenerates) so a bound passes when its worst node sits no more than
    ``rel_tol`` below the proven envelope.  c_rr is recovered from the
    differential equation itself, c_rr = e^{2z} F(c) - (2/r) c_r, which at
    the discrete solution equals the second difference of the profile.
    """
    entries = []
    for z in z_values:
        prof = solve_nutrient(model, z, grid, tol=tol)
        e2z = np.exp(2.0 * float(z))
        f1 = float(model.F(np.array(1.0))[0])
        scale = f1 * e2z if f1 * e2z > 0 else 1.0
        r, c, c_r, c_z = grid.r, prof.c, prof.c_r, prof.c_z

        c_rr = np.empty(grid.n)
        fv, _ = model.F(c)
        c_rr[1:] = e2z * fv[1:] - 2.0 / r[1:] * c_r[1:]
        c_rr[0] = e2z * fv[0] / 3.0

        lower_z = -(1.0 - r**2) * f1 * e2z / 3.0
        margins = (
            min(c.min(), (1.0 - c).min()),  # B1, scale 1
            c_r.min() / scale,
            (-c_z).min() / scale,
            (r * f1 * e2z / 3.0 - c_r).min() / scale,
            (c_z - lower_z).min() / scale,
            min((c_rr + 2.0 * f1 * e2z / 3.0).min(),
                (f1 * e2z - c_rr).min()) / scale,
            (c_z - lower_z).min() / scale,
        )
        for name, m in zip(BOUND_NAMES, margins):
            entries.append(BoundsEntry(z=float(z), name=name, margin=float(m),
                                       passed=bool(m >= -rel_tol)))
    return BoundsReport(entries=entries, rel_tol=rel_tol)
