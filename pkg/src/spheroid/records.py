"""Deviation-from-stationary diagnostics recorded along trajectories.

The record mirrors the quantities controlled by the exponential-return
estimates: sup norms of the nutrient and proliferating-fraction deviations
and their spatial derivatives (the p-derivative weighted by r(1-r), which
is the natural weight at the characteristic rest points r=0, 1), the
log-radius offset, time-derivative surrogates from output-to-output finite
differences, and the off-manifold nutrient norm ||c - m(.; z)||.
"""

from dataclasses import dataclass

import numpy as np


@dataclass
class DeviationRecord:
    t: float
    c_dev: float            # sup |c - c*|
    c_r_dev: float          # sup |c_r - c*'|
    c_t_dev: float          # sup |c_t| (finite difference vs previous output)
    p_dev: float            # sup |p - p*|
    p_r_weighted_dev: float  # sup r(1-r) |p_r - p*'|
    z_dev: float            # |z - z*|
    z_dot_dev: float        # |z_dot| (finite difference vs previous output)
    eta_dev: float          # sup |c - m(.; z)|

    NORM_FIELDS = ("c_dev", "c_r_dev", "c_t_dev", "p_dev",
                   "p_r_weighted_dev", "z_dev", "z_dot_dev", "eta_dev")

    def norms(self):
        return {name: getattr(self, name) for name in self.NORM_FIELDS}

    def max_norm(self):
        return max(self.norms().values())


def deviation_norms(state, prev, stationary, profile):
    """Build a :class:`DeviationRecord` for ``state``.

    Parameters
    ----------
    state : State
    prev : State or None
        Previous output state; time derivatives are backward differences
        against it and zero when absent.
    stationary : StationarySolution
        Reference fields on the same grid.
    profile : NutrientProfile
        Nutrient profile at the state's own z, for the off-manifold norm.
    """
    if state.c.shape != stationary.c.shape:
        raise ValueError(
            f"grid mismatch: state has {state.c.size} nodes, "
            f"stationary has {stationary.c.size}")
    grid = stationary.grid
    r, h = grid.r, grid.h
    weight = r * (1.0 - r)

    c_r = np.gradient(state.c, h, edge_order=2)
    p_r = np.gradient(state.p, h, edge_order=2)
    cstar_r = np.gradient(stationary.c, h, edge_order=2)
    pstar_r = np.gradient(stationary.p, h, edge_order=2)

    if prev is not None and prev.t != state.t:
        dt_out = state.t - prev.t
        c_t = float(np.max(np.abs(state.c - prev.c)) / abs(dt_out))
        z_dot = float(abs(state.z - prev.z) / abs(dt_out))
    else:
        c_t = 0.0
        z_dot = 0.0

    return DeviationRecord(
        t=float(state.t),
        c_dev=float(np.max(np.abs(state.c - stationary.c))),
        c_r_dev=float(np.max(np.abs(c_r - cstar_r))),
        c_t_dev=c_t,
        p_dev=float(np.max(np.abs(state.p - stationary.p))),
        p_r_weighted_dev=float(np.max(weight * np.abs(p_r - pstar_r))),
        z_dev=float(abs(state.z - stationary.z)),
        z_dot_dev=z_dot,
        eta_dev=float(np.max(np.abs(state.c - profile.c))),
    )


@dataclass
class AdmissibilityReport:
    """Outcome of the initial-data conditions check.

    Conditions: (i) c0 smooth with c0'(0) = 0, c0(1) = 1, 0 <= c0 <= 1;
    (ii) p0 in [0, 1] with p0(1) = 1 at the boundary rest point;
    (iii, iv) deviations from the stationary fields are finite and small.
    Violations are reported, not raised; (ii)'s p0(1) = 1 is typically
    inherited false because the boundary rest point of the reaction sits
    below 1 whenever K_Q(1) > 0.
    """
    issues: list
    c_dev: float
    p_dev: float
    z_dev: float

    @property
    def admissible(self):
        return not self.issues


def admissibility_report(state, stationary, grid, tol=1e-8):
    r, h = grid.r, grid.h
    issues = []
    c, p = state.c, state.p
    if abs(c[-1] - 1.0) > tol:
        issues.append(f"c(1) = {c[-1]:.6g}, expected 1")
    c0_slope = (-3.0 * c[0] + 4.0 * c[1] - c[2]) / (2.0 * h)
    if abs(c0_slope) > max(10.0 * h**2, 1e-6):
        issues.append(f"c'(0) = {c0_slope:.3e}, expected 0")
    if c.min() < -tol or c.max() > 1.0 + tol:
        issues.append(f"c range [{c.min():.3g}, {c.max():.3g}] outside [0, 1]")
    if p.min() < -tol or p.max() > 1.0 + tol:
        issues.append(f"p range [{p.min():.3g}, {p.max():.3g}] outside [0, 1]")
    if abs(p[-1] - 1.0) > tol:
        issues.append(f"p(1) = {p[-1]:.6g}, boundary rest-point condition p(1)=1 not met")
    return AdmissibilityReport(
        issues=issues,
        c_dev=float(np.max(np.abs(c - stationary.c))),
        p_dev=float(np.max(np.abs(p - stationary.p))),
        z_dev=float(abs(state.z - stationary.z)),
    )
