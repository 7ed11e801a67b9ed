"""Perturbation studies: admissible initial data, decay-rate fits,
stability experiment matrices, and self-convergence orders.
"""

import logging
from dataclasses import dataclass, replace

import numpy as np

from .errors import InsufficientDataError
from .evolution import SolverConfig, State, simulate, step
from .grid import Grid
from .nutrient import solve_nutrient
from .rates import Rate
from .records import DeviationRecord, deviation_norms  # noqa: F401
from .stationary import solve_stationary

log = logging.getLogger("spheroid")

PERTURBATION_SHAPES = ("poly", "cosine", "random")


def _shape_profiles(shape, r, rng):
    """Return (phi_c, psi, xi): c-shape, p-shape, z-offset factor.

    All shapes satisfy phi(1) = 0 and phi'(0) = 0 so the perturbed data
    keep c(1) = 1 and the symmetry condition; sup|phi| = 1 and |xi| <= 1.
    """
    if shape == "poly":
        phi = 1.0 - r**2
        return phi, phi, 1.0
    if shape == "cosine":
        phi = np.cos(np.pi * r / 2.0)
        return phi, phi, -1.0
    if shape == "random":
        # smooth random combination of even cosine modes vanishing at r=1
        coef = rng.standard_normal(4)
        phi = np.zeros_like(r)
        for k, a in enumerate(coef):
            phi += a * np.cos((2 * k + 1) * np.pi * r / 2.0)
        phi /= np.max(np.abs(phi))
        coef2 = rng.standard_normal(4)
        psi = np.zeros_like(r)
        for k, a in enumerate(coef2):
            psi += a * np.cos((2 * k + 1) * np.pi * r / 2.0)
        psi /= np.max(np.abs(psi))
        xi = float(rng.uniform(-1.0, 1.0))
        return phi, psi, xi
    raise ValueError(f"unknown perturbation shape {shape!r}; "
                     f"choose from {PERTURBATION_SHAPES}")


def admissible_init(stationary, delta, shape="poly", seed=0, strict_p_boundary=False):
    """Perturbed admissible initial data around the stationary solution.

    c0 = clamp(c* + delta*phi, 0, 1) with phi(1) = 0 and phi'(0) = 0,
    p0 = clamp(p* + delta*psi, 0, 1), z0 = z* + delta*xi with |xi| <= 1.
    ``seed`` only matters for the "random" shape.  With
    ``strict_p_boundary`` the p-perturbation is additionally pinned so
    p0(1) = 1 (the boundary rest-point form of the admissibility
    conditions); by default p0(1) inherits p*(1).
    """
    if delta < 0:
        raise ValueError("delta must be >= 0")
    grid = stationary.grid
    r = grid.r
    rng = np.random.default_rng(seed)
    phi, psi, xi = _shape_profiles(shape, r, rng)

    c0 = np.clip(stationary.c + delta * phi, 0.0, 1.0)
    c0[-1] = 1.0
    p0 = np.clip(stationary.p + delta * psi, 0.0, 1.0)
    if strict_p_boundary:
        p0[-1] = 1.0
    z0 = stationary.z + delta * xi

    clipped = (np.sum(stationary.c + delta * phi != c0)
               + np.sum(stationary.p + delta * psi != p0))
    if clipped > 0.01 * 2 * grid.n:
        log.warning("perturbation clamped at %d of %d nodes", clipped, 2 * grid.n)
    return State(t=0.0, z=float(z0), c=c0, p=p0)


@dataclass
class DecayFit:
    mu: float        # fitted exponential rate (positive = decay)
    prefactor: float
    t_start: float
    t_end: float
    r_squared: float
    n_points: int


def fit_decay(series, window=0.5, floor=1e-13):
    """Least-squares exponential fit on the tail of a norm time series.

    Parameters
    ----------
    series : sequence of (t, value)
    window : float
        Fraction of the usable samples (those above ``floor``), counted
        from the end, used for the fit; the discarded head absorbs the
        nonmodal transient.
    floor : float
        Values at or below this are treated as numerical noise and
        excluded.

    Returns
    -------
    DecayFit
        mu is minus the slope of log(value) against t; the prefactor is
        exp(intercept).  Scaling the series by k > 0 scales the prefactor
        by k and leaves mu unchanged.

    Raises
    ------
    InsufficientDataError
        Fewer than 5 usable points in the window.
    """
    pts = [(float(t), float(y)) for t, y in series if y > floor]
    if len(pts) >= 1:
        start = int(np.floor(len(pts) * (1.0 - window)))
        pts = pts[start:]
    if len(pts) < 5:
        raise InsufficientDataError(
            f"need >= 5 usable points above floor {floor:g}, have {len(pts)}")
    t = np.array([p[0] for p in pts])
    y = np.log(np.array([p[1] for p in pts]))
    slope, intercept = np.polyfit(t, y, 1)
    fit = slope * t + intercept
    ss_res = float(np.sum((y - fit) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return DecayFit(mu=float(-slope), prefactor=float(np.exp(intercept)),
                    t_start=float(t[0]), t_end=float(t[-1]),
                    r_squared=r2, n_points=len(pts))


def effective_absorption(model, profile, y, quad_points=16):
    """Averaged consumption slope a(r; y, z) = int_0^1 F'(m + theta*y) d theta.

    Diagnostic for the off-manifold nutrient deviation: the transformed
    deviation equation absorbs the nonlinearity through this coefficient.
    Evaluated by Gauss-Legendre quadrature in theta; exact for linear F.
    """
    nodes, weights = np.polynomial.legendre.leggauss(quad_points)
    theta = 0.5 * (nodes + 1.0)
    wts = 0.5 * weights
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(profile.c)
    for th, wt in zip(theta, wts):
        _, dfv = model.F(profile.c + th * y)
        out += wt * dfv
    return out


@dataclass
class StabilityCell:
    eps: float
    delta: float
    shape: str
    seed: int
    status: str              # "ok", "skipped", or "error: ..."
    converged: bool          # all norms fell below delta/10
    crossing_time: float     # first time all norms are below delta/10 (nan if never)
    fits: dict               # norm name -> DecayFit or None (at floor / no data)
    clip_events: int = 0     # range clips beyond tolerance during the run
    clip_excess: float = 0.0


@dataclass
class StabilityReport:
    cells: list
    horizon: float

    @property
    def all_ran(self):
        return all(not c.status.startswith("error") for c in self.cells)

    @property
    def largest_decaying_eps(self):
        """Largest eps whose perturbed runs all returned to the stationary
        state within the horizon: an empirical proxy for the stability
        threshold, with no claim about the true one."""
        by_eps = {}
        for c in self.cells:
            if c.status != "skipped":
                ok = c.status == "ok" and c.converged
                by_eps[c.eps] = by_eps.get(c.eps, True) and ok
        good = [eps for eps, ok in by_eps.items() if ok]
        return max(good) if good else float("nan")


def stability_experiment(model, grid, config, eps_list, delta_list, shapes,
                         seeds, stationary=None, fit_window=0.5,
                         fit_floor=1e-13, workers=1):
    """Run the perturbation-decay matrix and fit rates per norm.

    For each cell (eps, delta, shape, seed): perturb the stationary
    solution, simulate to config.t_end, fit an exponential to every
    deviation norm, and record whether all norms fell below delta/10 and
    when.  delta = 0 cells are recorded with the fits skipped.  A failing
    cell is reported in its status, not raised.  Cells are independent and
    may run on ``workers`` threads; the report always lists them in
    deterministic (eps, delta, shape, seed) order and is bit-identical
    regardless of worker count.
    """
    if stationary is None:
        stationary = solve_stationary(model, grid, config=config,
                                      cross_check=False)
    keys = [(float(eps), float(delta), shape, int(seed))
            for eps in eps_list for delta in delta_list
            for shape in shapes for seed in seeds]

    def run(key):
        eps, delta, shape, seed = key
        return _run_cell(model, grid, config, stationary, eps, delta, shape,
                         seed, fit_window, fit_floor)

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(run, keys))
    else:
        cells = [run(key) for key in keys]
    return StabilityReport(cells=cells, horizon=config.t_end)


def _run_cell(model, grid, config, stationary, eps, delta, shape, seed,
              fit_window, fit_floor):
    cfg = SolverConfig(**{**config.__dict__, "eps": eps})
    if delta == 0.0:
        return StabilityCell(eps=eps, delta=delta, shape=shape, seed=seed,
                             status="skipped", converged=True,
                             crossing_time=0.0,
                             fits={k: None for k in DeviationRecord.NORM_FIELDS})
    try:
        init = admissible_init(stationary, delta, shape, seed)
        result = simulate(model, init, grid, cfg, stationary)
    except Exception as exc:  # failed cell is reported, not fatal
        log.warning("stability cell (eps=%g, delta=%g, %s, %d) failed: %s",
                    eps, delta, shape, seed, exc)
        return StabilityCell(eps=eps, delta=delta, shape=shape, seed=seed,
                             status=f"error: {exc}", converged=False,
                             crossing_time=float("nan"), fits={})
    fits = {}
    for name in DeviationRecord.NORM_FIELDS:
        series = [(rec.t, getattr(rec, name)) for rec in result.records]
        try:
            fits[name] = fit_decay(series, window=fit_window, floor=fit_floor)
        except InsufficientDataError:
            fits[name] = None  # at the noise floor throughout
    crossing = float("nan")
    for rec in result.records:
        if rec.max_norm() < delta / 10.0:
            crossing = rec.t
            break
    return StabilityCell(eps=eps, delta=delta, shape=shape, seed=seed,
                         status="ok", converged=not np.isnan(crossing),
                         crossing_time=crossing, fits=fits,
                         clip_events=result.clip.events,
                         clip_excess=result.clip.max_excess)


@dataclass
class ConvergenceStudy:
    kind: str        # "diffusion-h", "transport-h", or "dt"
    levels: list     # grid sizes or dt values, coarse to fine
    diffs: list      # successive max-norm differences
    orders: list     # log2 ratios of successive differences
    conclusive: bool

    @property
    def observed_order(self):
        return min(self.orders) if self.orders else float("nan")


def _state_diff(a, b, stride):
    return max(float(np.max(np.abs(a.c[::stride] - b.c))),
               float(np.max(np.abs(a.p[::stride] - b.p))),
               abs(a.z - b.z))


def _orders_from_diffs(diffs):
    orders = []
    conclusive = True
    for d0, d1 in zip(diffs[:-1], diffs[1:]):
        if d1 <= 0 or d0 <= 0:
            conclusive = False
            orders.append(float("nan"))
        else:
            orders.append(float(np.log2(d0 / d1)))
            if d1 >= d0:
                conclusive = False
    return orders, conclusive


def self_convergence(model, make_init, config, grid_sizes=(101, 201, 401),
                     dt_values=(0.08, 0.04, 0.02), kind="dt", t_end=None):
    """Observed convergence order from matched self-refinement runs.

    Parameters
    ----------
    model : RateModel
    make_init : callable
        ``make_init(grid) -> State`` building matched initial data on each
        grid (grids nest when sizes follow n -> 2n-1).
    config : SolverConfig
        Base configuration; the study overrides dt or the grid per level.
    grid_sizes, dt_values : sequences, >= 3 levels, coarse to fine
    kind : str
        "dt" refines the step at the finest grid; "diffusion-h" and
        "transport-h" refine the grid at fixed dt (the names only label
        the report).
    t_end : float, optional
        Override config.t_end for the study runs.

    Returns
    -------
    ConvergenceStudy
        Non-monotone successive differences mark the study inconclusive
        rather than raising.
    """
    t_end = config.t_end if t_end is None else t_end
    finals = []
    if kind == "dt":
        if len(dt_values) < 3:
            raise ValueError("need >= 3 dt levels")
        grid = Grid(grid_sizes[-1]) if isinstance(grid_sizes, (tuple, list)) else Grid(grid_sizes)
        for dt in dt_values:
            cfg = SolverConfig(**{**config.__dict__, "dt": dt, "t_end": t_end,
                                  "output_interval": max(dt, config.output_interval)})
            finals.append(_integrate_plain(model, make_init(grid), grid, cfg))
        diffs = [_state_diff(a, b, 1) for a, b in zip(finals[:-1], finals[1:])]
        levels = list(dt_values)
    else:
        if len(grid_sizes) < 3:
            raise ValueError("need >= 3 grid levels")
        for n in grid_sizes:
            grid = Grid(n)
            cfg = SolverConfig(**{**config.__dict__, "t_end": t_end})
            finals.append(_integrate_plain(model, make_init(grid), grid, cfg))
        diffs = []
        for a, b in zip(finals[:-1], finals[1:]):
            stride = (b.c.size - 1) // (a.c.size - 1)
            diffs.append(_state_diff(b, a, stride))
        levels = list(grid_sizes)
    orders, conclusive = _orders_from_diffs(diffs)
    return ConvergenceStudy(kind=kind, levels=levels, diffs=diffs,
                            orders=orders, conclusive=conclusive)


def _integrate_plain(model, init, grid, config):
    """Step to t_end without recording (convergence studies only)."""
    state = init.copy()
    if config.eps == 0.0:
        state.c = solve_nutrient(model, state.z, grid, tol=config.bvp_tol,
                                 guess=state.c).c
    for _ in range(round((config.t_end - state.t) / config.dt)):
        state = step(model, state, grid, config)
    return state


# observed-order thresholds the standard suite is expected to meet
CONVERGENCE_THRESHOLDS = {"diffusion-h": 1.8, "transport-h": 1.5, "dt": 1.8}


def standard_convergence_suite(model, stationary=None, grid_sizes=(101, 201, 401),
                               dt_values=(0.08, 0.04, 0.02), dt_grid_n=201):
    """The three canonical refinement studies.

    * diffusion-h: all cell kinetics zeroed, eps > 0, so only the nutrient
      diffuses; grid refinement at small fixed dt isolates the O(h^2)
      stencil.
    * transport-h: consumption zeroed (c = 1 throughout in quasi-static
      mode), so only advection/reaction act; grid refinement at fixed dt
      isolates the interpolation-limited semi-Lagrangian order.
    * dt: the full model in quasi-static mode with the time-centered
      splitting, refined in dt at fixed grid, from a perturbed stationary
      state (supplied or computed at ``dt_grid_n``).

    Returns a list of :class:`ConvergenceStudy`; compare each study's
    ``observed_order`` against :data:`CONVERGENCE_THRESHOLDS`.
    """
    zero = Rate("constant", {"value": 0.0})
    studies = []

    diff_model = replace(model, K_B=zero, K_P=zero, K_Q=zero, K_D=zero)

    def diff_init(grid):
        c0 = 1.0 - 0.5 * (1.0 - grid.r**2)
        return State(t=0.0, z=0.3, c=c0, p=np.full(grid.n, 0.5))

    diff_cfg = SolverConfig(eps=0.05, dt=2e-3, t_end=1.0, output_interval=1.0)
    studies.append(self_convergence(diff_model, diff_init, diff_cfg,
                                    grid_sizes=grid_sizes, kind="diffusion-h"))

    adv_model = replace(model, F=zero)

    def adv_init(grid):
        c0 = np.ones(grid.n)
        p0 = 0.5 + 0.3 * np.cos(np.pi * grid.r / 2.0)
        return State(t=0.0, z=0.3, c=c0, p=p0)

    adv_cfg = SolverConfig(eps=0.0, dt=0.01, t_end=2.0, output_interval=1.0)
    studies.append(self_convergence(adv_model, adv_init, adv_cfg,
                                    grid_sizes=grid_sizes, kind="transport-h"))

    dt_grid = Grid(dt_grid_n)
    if stationary is None or stationary.grid != dt_grid:
        stationary = solve_stationary(model, dt_grid, cross_check=False)

    def dt_init(grid):
        return admissible_init(stationary, 0.01, "poly")

    dt_cfg = SolverConfig(eps=0.0, dt=dt_values[-1], t_end=4.0,
                          output_interval=1.0, splitting="heun")
    studies.append(self_convergence(model, dt_init, dt_cfg,
                                    grid_sizes=dt_grid_n, dt_values=dt_values,
                                    kind="dt"))
    return studies
