"""Rate functions of the two-species spheroid model.

Five rates drive the dynamics: nutrient consumption ``F``, cell birth
``K_B``, quiescent-to-proliferating transfer ``K_P``, proliferating-to-
quiescent transfer ``K_Q``, and death of quiescent cells ``K_D``.  Each is
a smooth scalar function of the nutrient concentration ``c``, picked from a
small set of parametric families.  The model is well posed when the rates
satisfy the monotonicity/sign conditions checked by
:func:`check_assumptions`:

* (A1) ``F' > 0`` and ``F(0) = 0``
* (A2) ``K_B' > 0``, ``K_P' >= 0``, ``K_B(0) = K_P(0) = 0``
* (A3) ``K_D >= 0``, ``K_Q >= 0``, ``K_D' <= 0``, ``K_Q' <= 0``
* (A4) ``K_B' + K_D' > 0``
* (A5) ``K_P' + K_Q' > 0``

Derivatives are analytic per family so that implicit solvers get exact
Jacobians.  All evaluations are vectorized over ``c``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, UnknownRateError

RATE_NAMES = ("F", "K_B", "K_P", "K_Q", "K_D")


def _linear(c, prm):
    slope = prm["slope"]
    return slope * c, np.full_like(c, slope)


def _sigmoid(c, prm):
    # amp * (1 - tanh(steepness*(c-center))) / 2: positive, decreasing.
    amp, s, c0 = prm["amp"], prm["steepness"], prm["center"]
    th = np.tanh(s * (c - c0))
    val = amp * (1.0 - th) / 2.0
    der = -amp * s / 2.0 * (1.0 - th * th)
    return val, der


def _constant(c, prm):
    v = prm["value"]
    return np.full_like(c, v), np.zeros_like(c)


def _michaelis(c, prm):
    # saturating uptake vmax * c / (k + c); increasing with value 0 at 0
    vmax, k = prm["vmax"], prm["k"]
    den = k + c
    return vmax * c / den, vmax * k / (den * den)


# family -> (callable, default parameters)
FAMILIES = {
    "linear": (_linear, {"slope": 1.0}),
    "sigmoid": (_sigmoid, {"amp": 0.5, "steepness": 1.0, "center": 0.5}),
    "constant": (_constant, {"value": 0.0}),
    "michaelis": (_michaelis, {"vmax": 2.0, "k": 0.5}),
}


@dataclass(frozen=True)
class Rate:
    """One rate function: a family name plus its numeric parameters."""

    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise UnknownRateError(f"unknown rate family {self.family!r}")
        _, defaults = FAMILIES[self.family]
        unknown = set(self.params) - set(defaults)
        if unknown:
            raise ValueError(
                f"family {self.family!r} does not take parameters {sorted(unknown)}")
        full = dict(defaults)
        full.update({k: float(v) for k, v in self.params.items()})
        object.__setattr__(self, "params", full)

    def __call__(self, c):
        fn, _ = FAMILIES[self.family]
        return fn(np.asarray(c, dtype=float), self.params)


@dataclass(frozen=True)
class RateModel:
    """The five rates plus the validity interval for ``c``.

    Evaluations are accepted on the validity interval extended by
    ``margin`` on each side; beyond that a :class:`DomainError` is raised.
    Instances are immutable and safe to share between concurrent runs.
    """

    F: Rate
    K_B: Rate
    K_P: Rate
    K_Q: Rate
    K_D: Rate
    c_lo: float = 0.0
    c_hi: float = 1.0
    margin: float = 0.5

    def rate(self, name):
        if name not in RATE_NAMES:
            raise UnknownRateError(f"unknown rate id {name!r}")
        return getattr(self, name)


def default_model():
    """Default parameter set; passes all of (A1)-(A5) on [0, 1].

    Tuned so the stationary tumor sits at a moderate log-radius
    (z* ~ 1.6) with an exponential return rate near 0.12 per unit time.
    """
    return RateModel(
        F=Rate("linear", {"slope": 1.5}),
        K_B=Rate("linear", {"slope": 0.7}),
        K_P=Rate("linear", {"slope": 0.6}),
        K_Q=Rate("sigmoid", {"amp": 0.8, "steepness": 1.0, "center": 0.5}),
        K_D=Rate("sigmoid", {"amp": 1.2, "steepness": 1.0, "center": 0.55}),
    )


def check_domain(model, c, context):
    """Validate concentrations against the extended validity interval."""
    arr = np.asarray(c, dtype=float)
    lo = model.c_lo - model.margin
    hi = model.c_hi + model.margin
    if np.any(arr < lo) or np.any(arr > hi):
        bad = arr[(arr < lo) | (arr > hi)]
        raise DomainError(
            f"{context}: c={np.ravel(bad)[0]:.6g} outside [{lo:g}, {hi:g}]")
    return arr


def eval_rate(model, name, c):
    """Evaluate one rate and its derivative at concentration ``c``.

    Parameters
    ----------
    model : RateModel
    name : str
        One of ``RATE_NAMES``.
    c : float or array
        Concentration; must lie within the validity interval extended by
        ``model.margin``.

    Returns
    -------
    (value, derivative) : pair of arrays (or scalars, matching ``c``)
    """
    rate = model.rate(name)
    arr = check_domain(model, c, f"rate {name}")
    val, der = rate(arr)
    if np.isscalar(c):
        return float(val), float(der)
    return val, der


def _vals(model, c):
    arr = check_domain(model, c, "rate composite")
    f, _ = model.F(arr)
    kb, _ = model.K_B(arr)
    kp, _ = model.K_P(arr)
    kq, _ = model.K_Q(arr)
    kd, _ = model.K_D(arr)
    return f, kb, kp, kq, kd


def f_reaction(model, c, p):
    """Reaction term of the proliferating fraction.

    f(c, p) = K_P(c) + [K_M(c) - K_N(c)] p - K_M(c) p^2 with
    K_M = K_B + K_D and K_N = K_P + K_Q.  Quadratic and concave in p,
    with f(c, 0) = K_P(c) >= 0 and f(c, 1) = -K_Q(c) <= 0, so [0, 1] is
    forward-invariant along characteristics.
    """
    _, kb, kp, kq, kd = _vals(model, c)
    km = kb + kd
    kn = kp + kq
    p = np.asarray(p, dtype=float)
    out = kp + (km - kn) * p - km * p * p
    return float(out) if out.ndim == 0 else out


def g_source(model, c, p):
    """Volume source g(c, p) = K_M(c) p - K_D(c); affine in p."""
    _, kb, kp, kq, kd = _vals(model, c)
    p = np.asarray(p, dtype=float)
    out = (kb + kd) * p - kd
    return float(out) if out.ndim == 0 else out


def f_reaction_partials(model, c, p):
    """Return (f, df/dc, df/dp) at (c, p)."""
    arr = check_domain(model, c, "reaction partials")
    p = np.asarray(p, dtype=float)
    kb, dkb = model.K_B(arr)
    kp, dkp = model.K_P(arr)
    kq, dkq = model.K_Q(arr)
    kd, dkd = model.K_D(arr)
    km, dkm = kb + kd, dkb + dkd
    kn, dkn = kp + kq, dkp + dkq
    f = kp + (km - kn) * p - km * p * p
    f_c = dkp + (dkm - dkn) * p - dkm * p * p
    f_p = (km - kn) - 2.0 * km * p
    if f.ndim == 0:
        return float(f), float(f_c), float(f_p)
    return f, f_c, f_p


def g_source_partials(model, c, p):
    """Return (g, dg/dc, dg/dp) at (c, p)."""
    arr = check_domain(model, c, "source partials")
    p = np.asarray(p, dtype=float)
    kb, dkb = model.K_B(arr)
    kd, dkd = model.K_D(arr)
    g = (kb + kd) * p - kd
    g_c = (dkb + dkd) * p - dkd
    g_p = kb + kd
    if g.ndim == 0:
        return float(g), float(g_c), float(g_p)
    return g, g_c, g_p


@dataclass
class AssumptionCheck:
    name: str
    passed: bool
    margin: float
    detail: str


@dataclass
class AssumptionReport:
    checks: list
    f_at_full_boundary: float  # f(1, 1) = -K_Q(1); zero only if K_Q(1) = 0
    samples: int

    @property
    def all_passed(self):
        return all(ch.passed for ch in self.checks)

    def lines(self):
        out = []
        for ch in self.checks:
            status = "pass" if ch.passed else "FAIL"
            out.append(f"{ch.name}: {status}  worst margin {ch.margin:+.3e}  ({ch.detail})")
        out.append(f"f(1,1) = -K_Q(1) = {self.f_at_full_boundary:+.6e}")
        return out


# rounding allowance for the non-strict inequalities
_EPS = 1e-12


def check_assumptions(model, samples=201):
    """Numerically verify (A1)-(A5) on the validity interval.

    Each inequality is sampled at ``samples`` evenly spaced points of
    [c_lo, c_hi].  Failures are reported, never raised.  Margins are
    signed: positive means the inequality holds with that much room.
    Also reports f(1, 1) = -K_Q(1), the reaction value at the boundary
    rest point when the proliferating fraction is 1 there.
    """
    if samples < 2:
        raise ValueError("samples must be >= 2")
    c = np.linspace(model.c_lo, model.c_hi, samples)
    fv, df = model.F(c)
    kb, dkb = model.K_B(c)
    kp, dkp = model.K_P(c)
    kq, dkq = model.K_Q(c)
    kd, dkd = model.K_D(c)
    f0 = float(model.F(np.array(0.0))[0])
    kb0 = float(model.K_B(np.array(0.0))[0])
    kp0 = float(model.K_P(np.array(0.0))[0])

    checks = []

    # margin is the slack in the sampled inequalities; the value-at-zero
    # equalities only cap it when violated
    m = df.min() if abs(f0) <= _EPS else min(df.min(), -abs(f0))
    checks.append(AssumptionCheck(
        "A1", df.min() > 0 and abs(f0) <= _EPS, m,
        f"min F'={df.min():.3e}, F(0)={f0:.1e}"))

    zeros_ok = abs(kb0) <= _EPS and abs(kp0) <= _EPS
    m = min(dkb.min(), dkp.min())
    if not zeros_ok:
        m = min(m, -abs(kb0), -abs(kp0))
    checks.append(AssumptionCheck(
        "A2", dkb.min() > 0 and dkp.min() >= -_EPS and zeros_ok, m,
        f"min K_B'={dkb.min():.3e}, min K_P'={dkp.min():.3e}"))

    m = min(kd.min(), kq.min(), -dkd.max(), -dkq.max())
    checks.append(AssumptionCheck(
        "A3", kd.min() >= -_EPS and kq.min() >= -_EPS
        and dkd.max() <= _EPS and dkq.max() <= _EPS, m,
        f"min K_D={kd.min():.3e}, min K_Q={kq.min():.3e}, "
        f"max K_D'={dkd.max():.3e}, max K_Q'={dkq.max():.3e}"))

    a4 = (dkb + dkd).min()
    checks.append(AssumptionCheck("A4", a4 > 0, a4, f"min K_B'+K_D'={a4:.3e}"))

    a5 = (dkp + dkq).min()
    checks.append(AssumptionCheck("A5", a5 > 0, a5, f"min K_P'+K_Q'={a5:.3e}"))

    f11 = float(f_reaction(model, 1.0, 1.0))
    return AssumptionReport(checks=checks, f_at_full_boundary=f11, samples=samples)
