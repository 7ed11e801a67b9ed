"""Time integration of the rescaled two-species free-boundary system.

State lives on the fixed unit interval after the log-radius rescaling
R(t) = e^{z(t)}.  One splitting step computes the velocity field from the
current state, advances the proliferating fraction along characteristics
(semi-Lagrangian) and the log-radius (Heun, with the boundary velocity
re-evaluated at the predictor state), then updates the nutrient: an
implicit tridiagonal solve for eps > 0, or the quasi-static profile
c = m(.; z) for eps = 0.

The nutrient step reuses the same spatial stencil as the quasi-static
solver, so the scheme's stationary point is independent of eps and dt up
to interpolation effects: trajectories for every eps decay to the same
discrete stationary state.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator
from scipy.linalg import LinAlgError

from .errors import NumericsError
from .nutrient import operator_rows, solve_nutrient, tri_apply, tri_solve
from .rates import f_reaction, g_source
from .records import admissibility_report, deviation_norms

log = logging.getLogger("spheroid")

SPLITTINGS = ("lie", "heun")
INTERPOLATIONS = ("pchip", "cubic", "linear")


@dataclass
class State:
    """Rescaled fields at one instant: time, log-radius, nutrient c,
    proliferating fraction p.  The quiescent fraction is implicit, q = 1 - p
    (the two species fill the tumor at constant total density)."""

    t: float
    z: float
    c: np.ndarray
    p: np.ndarray

    @property
    def radius(self):
        return float(np.exp(self.z))

    def copy(self):
        return State(t=self.t, z=self.z, c=self.c.copy(), p=self.p.copy())


@dataclass
class VelocityField:
    v: np.ndarray   # radial velocity, v(0) = 0
    w: np.ndarray   # effective advection w = v - r v(1); w(0) = w(1) = 0
    v1: float       # boundary velocity v(1)


@dataclass
class SolverConfig:
    """Scheme parameters; eps = 0 selects the quasi-static nutrient mode."""

    eps: float = 0.0
    dt: float = 0.02
    t_end: float = 80.0
    output_interval: float = 0.2
    splitting: str = "lie"       # "heun" enables the second-order composite
    interp: str = "pchip"        # foot interpolation for p and c
    theta: float = 1.0           # implicitness of the nutrient step
    bvp_tol: float = 1e-10
    clip_tol: float = 1e-10
    early_stop_floor: float = 0.0   # stop once all deviation norms drop below; 0 disables

    def __post_init__(self):
        if self.eps < 0:
            raise ValueError(f"eps must be >= 0, got {self.eps}")
        if self.dt <= 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.splitting not in SPLITTINGS:
            raise ValueError(f"splitting must be one of {SPLITTINGS}")
        if self.interp not in INTERPOLATIONS:
            raise ValueError(f"interp must be one of {INTERPOLATIONS}")
        if not 0.5 <= self.theta <= 1.0:
            raise ValueError(f"theta must lie in [0.5, 1], got {self.theta}")
        if self.output_interval < self.dt:
            raise ValueError("output_interval must be >= dt")

    @property
    def steps_per_output(self):
        return max(1, round(self.output_interval / self.dt))


@dataclass
class ClipStats:
    """Range-enforcement bookkeeping: how often and how far fields left [0, 1]."""

    events: int = 0
    max_excess: float = 0.0

    def clip(self, arr, tol):
        excess = max(float(-arr.min()), float(arr.max() - 1.0), 0.0)
        if excess > tol:
            self.events += 1
            self.max_excess = max(self.max_excess, excess)
        if excess > 0.0:
            return np.clip(arr, 0.0, 1.0)
        return arr


def velocity_from_state(model, state, grid):
    """Velocity field induced by the volume source g(c, p).

    v(r) = r^-2 * int_0^r g(c, p) rho^2 d rho via the exact-weight
    product-trapezoid rule; v(0) = 0 and w = v - r v(1) vanish exactly at
    both endpoints.
    """
    g = g_source(model, state.c, state.p)
    integral = grid.cumulative_radial_integral(g)
    v = np.zeros(grid.n)
    v[1:] = integral[1:] / grid.r[1:] ** 2
    v1 = float(v[-1])
    w = v - grid.r * v1
    w[-1] = 0.0
    return VelocityField(v=v, w=w, v1=v1)


def _interpolator(kind, r, y):
    if kind == "pchip":
        return PchipInterpolator(r, y)
    if kind == "cubic":
        return CubicSpline(r, y)
    return lambda x: np.interp(x, r, y)


def transport_step(model, state, vel, dt, grid, interp="pchip",
                   c_head=None, w_override=None):
    """Semi-Lagrangian update of the proliferating fraction over one step.

    Feet of the backward characteristics of dr/ds = w(r) are traced with
    midpoint RK2 (w frozen over the step), clamped to [0, 1] (they cannot
    leave, since w vanishes at both endpoints; clamping only absorbs
    rounding).  p is interpolated at the feet with a monotonicity-
    preserving cubic by default, then integrated along the characteristic
    with Heun's method, evaluating the reaction at the foot (nutrient at
    the step start) and at the head (``c_head``, defaulting to the
    step-start nutrient at the node).
    """
    r = grid.r
    w = vel.w if w_override is None else w_override
    w_sp = CubicSpline(r, w)
    r_mid = np.clip(r - 0.5 * dt * w, 0.0, 1.0)
    feet = np.clip(r - dt * w_sp(r_mid), 0.0, 1.0)
    # w(0) = w(1) = 0 by construction: the endpoint feet are exact
    feet[0] = r[0]
    feet[-1] = r[-1]

    p_foot = _interpolator(interp, r, state.p)(feet)
    c_foot = _interpolator(interp, r, state.c)(feet)
    # rest points (w = 0, notably both endpoints) stay on their node and
    # evolve by the local reaction ODE alone; bypass interpolation noise
    still = feet == r
    p_foot[still] = state.p[still]
    c_foot[still] = state.c[still]
    head = state.c if c_head is None else c_head

    k1 = f_reaction(model, c_foot, p_foot)
    p_pred = p_foot + dt * k1
    k2 = f_reaction(model, head, p_pred)
    return p_foot + 0.5 * dt * (k1 + k2)


def boundary_radius_step(state, vel, dt, vel_pred=None):
    """Heun update of the log-radius, dz/dt = v(1).

    ``vel_pred`` is the velocity re-evaluated at the predictor state; when
    omitted the step reduces to Euler, exact for v(1) constant in time.
    """
    v1_pred = vel.v1 if vel_pred is None else vel_pred.v1
    return state.z + 0.5 * dt * (vel.v1 + v1_pred)


def nutrient_step(model, state, vel, dt, eps, grid, theta=1.0, z=None, v1=None):
    """One implicit step of the nutrient equation (eps > 0).

    eps e^{2z} c_t = c_rr + [2/r + eps e^{2z} r v(1)] c_r - e^{2z} F(c),
    with the consumption linearized about the current profile and treated
    implicitly, z and v(1) frozen at the step start (overridable for
    time-centered composites), the r = 0 row using the symmetric-limit
    stencil, and c(1) = 1 imposed strongly.  theta = 1 is fully implicit;
    theta = 0.5 is the time-centered variant.
    """
    if eps <= 0:
        raise ValueError("nutrient_step requires eps > 0; use quasi_static_update")
    z = state.z if z is None else z
    v1 = vel.v1 if v1 is None else v1
    e2z = np.exp(2.0 * z)
    beta = eps * e2z / dt
    lo, di, up = operator_rows(grid, beta=eps * e2z * v1)
    c = state.c
    fv, dfv = model.F(c)

    l_c = tri_apply(lo, di, up, c)
    l_c[-1] = 0.0
    a_lo = -theta * lo
    a_di = beta - theta * (di - e2z * dfv)
    a_up = -theta * up
    rhs = (beta * c + (1.0 - theta) * (l_c - e2z * fv)
           + theta * e2z * (dfv * c - fv))
    a_lo[-1] = 0.0
    a_di[-1] = 1.0
    rhs[-1] = 1.0
    try:
        return tri_solve(a_lo, a_di, a_up, rhs)
    except LinAlgError as exc:
        raise NumericsError(f"singular nutrient system at t={state.t:g}") from exc


def quasi_static_update(model, state, grid, tol=1e-10, z=None):
    """Replace the nutrient by the quasi-static profile at the current z."""
    z = state.z if z is None else z
    return solve_nutrient(model, z, grid, tol=tol, guess=state.c)


def step(model, state, grid, config, clip=None):
    """Advance the state by one splitting step of config.dt.

    Order: velocity from the current state; transport and log-radius using
    that field (the log-radius corrector re-evaluates the boundary
    velocity at the predictor state); then the nutrient update.  With
    ``splitting="heun"`` the transport and nutrient sub-steps are also
    time-centered using the predictor velocity field.  Fields are clipped
    to [0, 1] afterwards and clip events beyond config.clip_tol recorded.
    """
    clip = ClipStats() if clip is None else clip
    dt, eps = config.dt, config.eps
    vel = velocity_from_state(model, state, grid)

    if config.splitting == "lie":
        p_new = transport_step(model, state, vel, dt, grid, config.interp)
        z_pred = state.z + dt * vel.v1
        if eps == 0.0:
            c_pred = quasi_static_update(model, state, grid, config.bvp_tol, z=z_pred).c
        else:
            c_pred = nutrient_step(model, state, vel, dt, eps, grid, config.theta)
        pred = State(t=state.t + dt, z=z_pred, c=c_pred, p=p_new)
        vel_pred = velocity_from_state(model, pred, grid)
        z_new = boundary_radius_step(state, vel, dt, vel_pred)
        if eps == 0.0:
            c_new = solve_nutrient(model, z_new, grid, tol=config.bvp_tol,
                                   guess=c_pred).c
        else:
            c_new = c_pred
    else:  # "heun": full predictor pass, then time-centered corrector
        p_a = transport_step(model, state, vel, dt, grid, config.interp)
        z_a = state.z + dt * vel.v1
        if eps == 0.0:
            c_a = quasi_static_update(model, state, grid, config.bvp_tol, z=z_a).c
        else:
            c_a = nutrient_step(model, state, vel, dt, eps, grid, config.theta)
        pred = State(t=state.t + dt, z=z_a, c=c_a, p=p_a)
        vel_a = velocity_from_state(model, pred, grid)
        w_bar = 0.5 * (vel.w + vel_a.w)
        p_new = transport_step(model, state, vel, dt, grid, config.interp,
                               c_head=c_a, w_override=w_bar)
        z_new = boundary_radius_step(state, vel, dt, vel_a)
        if eps == 0.0:
            c_new = solve_nutrient(model, z_new, grid, tol=config.bvp_tol,
                                   guess=c_a).c
        else:
            c_new = nutrient_step(model, state, vel, dt, eps, grid, config.theta,
                                  z=0.5 * (state.z + z_a),
                                  v1=0.5 * (vel.v1 + vel_a.v1))

    c_new = clip.clip(c_new, config.clip_tol)
    p_new = clip.clip(np.asarray(p_new), config.clip_tol)
    return State(t=state.t + dt, z=z_new, c=c_new, p=p_new)


@dataclass
class SimResult:
    records: list          # DeviationRecord per output time
    aux: list              # (t, R, z, v1) per output time
    final_state: State
    clip: ClipStats
    warnings: list         # admissibility issues found at start
    stopped_early: bool


def simulate(model, init, grid, config, stationary, on_output=None,
             record_initial=True, prev_output=None):
    """Integrate from ``init`` to config.t_end, recording deviation norms.

    Parameters
    ----------
    model : RateModel
    init : State
        Initial data; checked against the admissibility conditions
        (violations are logged and returned, not raised).  In quasi-static
        mode the initial nutrient profile is projected onto c = m(.; z0)
        first, since eps = 0 slaves c to z.
    grid : Grid
    config : SolverConfig
    stationary : StationarySolution
        Reference for deviation norms (same grid).
    on_output : callable, optional
        ``on_output(state, step_index, output_index, record)`` called at
        every output time (snapshot/persistence hook).
    record_initial : bool
        Emit a record at init.t before stepping (disable when resuming).
    prev_output : State, optional
        Previous output state for time-difference norms when resuming.

    Returns
    -------
    SimResult
        records/aux in output order; NaN or inf in any field raises
        :class:`NumericsError` carrying the last healthy output state.
    """
    if not (np.isfinite(init.z) and np.all(np.isfinite(init.c))
            and np.all(np.isfinite(init.p))):
        raise NumericsError("non-finite initial data")
    report = admissibility_report(init, stationary, grid)
    for issue in report.issues:
        log.warning("initial data: %s", issue)

    state = init.copy()
    if config.eps == 0.0:
        prof = solve_nutrient(model, state.z, grid, tol=config.bvp_tol,
                              guess=state.c)
        state.c = prof.c

    records = []
    aux = []
    clip = ClipStats()
    prev = prev_output
    stopped_early = False
    k_out = config.steps_per_output
    n_steps = max(0, round((config.t_end - state.t) / config.dt))
    out_idx = 0

    def emit(step_index):
        profile = solve_nutrient(model, state.z, grid, tol=config.bvp_tol,
                                 guess=state.c)
        rec = deviation_norms(state, prev, stationary, profile)
        vel = velocity_from_state(model, state, grid)
        records.append(rec)
        aux.append((state.t, state.radius, state.z, vel.v1))
        if on_output is not None:
            on_output(state, step_index, out_idx, rec)
        return rec

    if record_initial:
        emit(0)
        out_idx += 1
        prev = state.copy()

    for k in range(1, n_steps + 1):
        try:
            state = step(model, state, grid, config, clip=clip)
        except (ValueError, FloatingPointError) as exc:
            raise NumericsError(f"step failed at t={state.t:g}: {exc}",
                                last_state=prev) from exc
        if not (np.isfinite(state.z) and np.all(np.isfinite(state.c))
                and np.all(np.isfinite(state.p))):
            raise NumericsError(
                f"non-finite state at t={state.t:g}",
                last_state=prev)
        if k % k_out == 0:
            rec = emit(k)
            out_idx += 1
            prev = state.copy()
            if (config.early_stop_floor > 0.0
                    and rec.max_norm() < config.early_stop_floor):
                stopped_early = True
                break

    if clip.events:
        log.warning("clipped fields beyond tolerance %d times (max excess %.3e)",
                    clip.events, clip.max_excess)
    return SimResult(records=records, aux=aux, final_state=state, clip=clip,
                     warnings=report.issues, stopped_early=stopped_early)
