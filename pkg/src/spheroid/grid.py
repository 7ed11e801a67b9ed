"""Uniform radial grid on [0, 1] and the quadrature/differencing helpers
shared by the solvers.

The cumulative integral uses a product-trapezoid rule: the integrand is
interpolated linearly on each cell while the rho^2 weight is integrated
exactly.  That keeps v(r) = r^-2 * integral accurate down to r = h, where
plain trapezoid on the weighted integrand would lose an order to the
division by r^2 (and makes the rule exact for constant and linear
integrands, so v = g0*r/3 holds exactly for constant g0).
"""

import numpy as np


class Grid:
    """Nodes r_i = i*h, h = 1/(n-1), spanning the rescaled tumor [0, 1]."""

    def __init__(self, n):
        n = int(n)
        if n < 3:
            raise ValueError(f"grid needs at least 3 nodes, got n={n}")
        self.n = n
        self.r = np.linspace(0.0, 1.0, n)
        self.h = 1.0 / (n - 1)
        # product-trapezoid weights for cumulative integral of f(rho)*rho^2
        rl, rr = self.r[:-1], self.r[1:]
        m0 = (rr**3 - rl**3) / 3.0
        m1 = (rr**4 - rl**4) / 4.0 - rl * m0
        self._w_right = m1 / (rr - rl)
        self._w_left = m0 - self._w_right

    def __eq__(self, other):
        return isinstance(other, Grid) and other.n == self.n

    def __hash__(self):
        return hash(("Grid", self.n))

    def __repr__(self):
        return f"Grid(n={self.n})"

    def cumulative_radial_integral(self, f):
        """Return I_i = integral_0^{r_i} f(rho) rho^2 d rho for nodal f."""
        f = np.asarray(f, dtype=float)
        out = np.zeros(self.n)
        np.cumsum(self._w_left * f[:-1] + self._w_right * f[1:], out=out[1:])
        return out

    def derivative(self, y, symmetric_origin=False):
        """Second-order nodal derivative: central inside, one-sided at ends.

        With ``symmetric_origin`` the derivative at r=0 is pinned to zero
        (even profile), and the r=1 end uses a third-order one-sided stencil
        so boundary noise does not dominate flux diagnostics.
        """
        y = np.asarray(y, dtype=float)
        d = np.empty_like(y)
        h = self.h
        d[1:-1] = (y[2:] - y[:-2]) / (2.0 * h)
        if symmetric_origin:
            d[0] = 0.0
            d[-1] = (11.0 * y[-1] - 18.0 * y[-2] + 9.0 * y[-3] - 2.0 * y[-4]) / (6.0 * h)
        else:
            d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h)
            d[-1] = (3.0 * y[-1] - 4.0 * y[-2] + y[-3]) / (2.0 * h)
        return d
