"""Bazykin predator-prey model approaching its Bogdanov-Takens point."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy.optimize import least_squares

from ..sde_engine import FastSlowSystem
from .base import ModelPreset, classify_eigenvalues

__all__ = ["BazykinAnalytics", "BTLocatorError", "SlowPath", "bazykin", "DEFAULT_START"]

DEFAULT_START = (3.1544, 1.8849, 0.3, 0.3293)


class BTLocatorError(RuntimeError):
    pass


@dataclass(frozen=True)
class SlowPath:
    """y2 = poly(y1) traversed with y1' = speed."""

    poly: Polynomial
    y1_start: float
    y1_end: float
    speed: float = 1.0

    def __call__(self, t):
        y1 = self.y1_start + np.asarray(t, float) * (self.y1_end - self.y1_start)
        return np.stack([y1, self.poly(y1)], axis=-1)

    def slope(self, y1):
        return self.poly.deriv()(np.asarray(y1, float))


@dataclass(frozen=True)
class BazykinAnalytics:
    gamma: float
    xi: float

    # the defining polynomials of the fold and Hopf curves in the (y1, y2) plane

    def coefficients(self, which: str) -> tuple:
        """(q0, q1, q2) polynomials in y1 with c = q0 + q1 y2 + q2 y2^2."""
        xi = self.xi
        P = Polynomial
        y1 = P([0.0, 1.0])
        if which == "lp":
            q0 = 4 * xi * (y1 - 1) ** 3
            q1 = (y1 ** 2 - 20 * y1 - 8) * xi ** 2 + 2 * xi * y1 * (y1 ** 2 - 11 * y1 + 10) + y1 ** 2 * (y1 - 1) ** 2
            q2 = -4 * (y1 + xi) ** 3
        elif which == "h":
            q0 = 4 * xi * (y1 * (y1 - 1) + xi * (y1 + 1))
            q1 = 2 * (xi + 1) * y1 ** 2 + (3 * xi ** 2 - 2 * xi - 1) * y1 + xi * (xi ** 2 - 2 * xi + 5)
            q2 = (y1 + xi - 1) ** 2
        else:
            raise ValueError(f"unknown curve {which!r}")
        return q0, q1, q2

    def _eval(self, which, y1, y2):
        q0, q1, q2 = self.coefficients(which)
        y1 = np.asarray(y1, float)
        y2 = np.asarray(y2, float)
        return q0(y1) + q1(y1) * y2 + q2(y1) * y2 ** 2

    def c_lp(self, y1, y2):
        return self._eval("lp", y1, y2)

    def c_h(self, y1, y2):
        return self._eval("h", y1, y2)

    def gradient(self, which: str, y1, y2) -> np.ndarray:
        q0, q1, q2 = self.coefficients(which)
        y1 = np.asarray(y1, float)
        y2 = np.asarray(y2, float)
        d1 = q0.deriv()(y1) + q1.deriv()(y1) * y2 + q2.deriv()(y1) * y2 ** 2
        d2 = q1(y1) + 2 * q2(y1) * y2
        return np.array([d1, d2])

    def scaled_value(self, which: str, y1: float, y2: float) -> float:
        """Polynomial value divided by its gradient norm (a distance to the curve)."""
        return float(self._eval(which, y1, y2) / np.linalg.norm(self.gradient(which, y1, y2)))

    def curve_y2(self, which: str, y1: float) -> np.ndarray:
        """Real y2 roots of c(y1, .) = 0; both polynomials are quadratic in y2."""
        q0, q1, q2 = self.coefficients(which)
        r = np.roots([q2(y1), q1(y1), q0(y1)])
        return np.sort(r[np.abs(r.imag) < 1e-12].real)

    def q2_bounds(self, y1: float):
        """(lower, upper) y2 limits of the stable wedge: Hopf curve below, fold curve above."""
        h = self.curve_y2("h", y1)
        lp = self.curve_y2("lp", y1)
        if h.size == 0 or lp.size == 0:
            raise ValueError(f"curves have no real branch at y1={y1}")
        return float(h.max()), float(lp.max())

    # fast subsystem

    def drift(self, x, y) -> np.ndarray:
        x1, x2 = x
        a, d = y
        q = x1 / (1.0 + a * x1)
        return np.array([x1 - q * x2 - self.xi * x1 ** 2, -self.gamma * x2 + q * x2 - d * x2 ** 2])

    def jacobian(self, x, y) -> np.ndarray:
        x1, x2 = x
        a, d = y
        den = 1.0 + a * x1
        dq = 1.0 / den ** 2
        q = x1 / den
        return np.array([[1.0 - dq * x2 - 2 * self.xi * x1, -q],
                         [dq * x2, -self.gamma + q - 2 * d * x2]])

    def interior_equilibria(self, y) -> list:
        """Positive equilibria (x1, x2), sorted by x1."""
        a, d = float(y[0]), float(y[1])
        g, xi = self.gamma, self.xi
        # x2 = (1 - xi x1)(1 + a x1) on the prey nullcline; substitute into the predator one
        p_prey = Polynomial([1.0, a]) * Polynomial([1.0, -xi])
        cubic = Polynomial([0.0, 1.0]) - g * Polynomial([1.0, a]) - d * p_prey * Polynomial([1.0, a])
        out = []
        for r in cubic.roots():
            # near a double root the pair picks up an O(sqrt(machine eps)) imaginary part
            if abs(r.imag) > 1e-6 * max(1.0, abs(r)) or r.real <= 0:
                continue
            x1 = r.real
            x2 = float(p_prey(x1))
            if x2 > 0:
                x = np.array([x1, x2])
                for _ in range(5):
                    try:
                        step = np.linalg.solve(self.jacobian(x, y), self.drift(x, y))
                    except np.linalg.LinAlgError:
                        break
                    if not np.all(np.isfinite(step)):
                        break
                    # the Jacobian is singular at a double root; keep only steps that help
                    trial = x - step
                    if np.linalg.norm(self.drift(trial, y)) >= np.linalg.norm(self.drift(x, y)):
                        break
                    x = trial
                if not any(np.allclose(x, o, rtol=1e-9, atol=1e-12) for o in out):
                    out.append(x)
        return sorted(out, key=lambda v: v[0])

    def attracting_equilibrium(self, y) -> np.ndarray:
        """Smallest-prey equilibrium that is a sink (the Q2 spiral sink)."""
        for x in self.interior_equilibria(y):
            if classify_eigenvalues(np.linalg.eigvals(self.jacobian(x, y))) == "Attracting":
                return x
        raise ValueError(f"no attracting interior equilibrium at y={tuple(y)}")

    def bt_point(self, grid: int = 400, tol: float = 1e-14, y1_range=(0.05, 0.95)) -> np.ndarray:
        """(y1, y2) where c_LP and c_H meet tangentially.

        A coarse grid scan seeds Gauss-Newton on the three conditions
        c_LP = 0, c_H = 0 and vanishing cross product of their gradients.
        """
        def resid(p):
            y1, y2 = p
            gl = self.gradient("lp", y1, y2)
            gh = self.gradient("h", y1, y2)
            nl = np.sqrt(gl[0] ** 2 + gl[1] ** 2)
            nh = np.sqrt(gh[0] ** 2 + gh[1] ** 2)
            return np.array([self.c_lp(y1, y2) / nl, self.c_h(y1, y2) / nh,
                             (gl[0] * gh[1] - gl[1] * gh[0]) / (nl * nh)])

        # coarse scan: the stable wedge between the curves closes at BT
        best = None
        for y1 in np.linspace(y1_range[0], y1_range[1], grid):
            try:
                lo, hi = self.q2_bounds(y1)
            except ValueError:
                continue
            if best is None or abs(hi - lo) < best[0]:
                best = (abs(hi - lo), y1, 0.5 * (lo + hi))
        if best is None:
            raise BTLocatorError("no fold/Hopf curve pair found in the scan range")
        seed = [best[1], best[2]]
        sol = least_squares(resid, seed, method="lm", xtol=tol, ftol=tol, gtol=tol)
        r = resid(sol.x)
        if not sol.success or np.max(np.abs(r)) > 1e-7:
            raise BTLocatorError(f"BT locator did not converge (residual {np.max(np.abs(r)):.2e})")
        return sol.x

    def bt_state(self) -> np.ndarray:
        """(x1, x2, y1, y2) at BT, refined by Newton on f = 0, trace = 0, det = 0."""
        y = self.bt_point()
        cands = self.interior_equilibria(y)
        if not cands:
            raise BTLocatorError("no equilibrium at the located BT parameters")
        x = min(cands, key=lambda v: abs(np.linalg.det(self.jacobian(v, y))))
        z = np.concatenate([x, y])

        def G(z):
            J = self.jacobian(z[:2], z[2:])
            return np.concatenate([self.drift(z[:2], z[2:]), [np.trace(J), np.linalg.det(J)]])

        for _ in range(40):
            h = 1e-7
            DJ = np.column_stack([(G(z + h * e) - G(z - h * e)) / (2 * h) for e in np.eye(4)])
            dz = np.linalg.solve(DJ, -G(z))
            z = z + dz
            if np.max(np.abs(dz)) < 1e-14 * max(1.0, np.max(np.abs(z))):
                break
        if np.max(np.abs(G(z))) > 1e-10:
            raise BTLocatorError("BT refinement failed")
        return z

    def default_waypoints(self, start=(DEFAULT_START[2], DEFAULT_START[3]),
                          y1_samples=(0.36, 0.40, 0.43, 0.445)) -> np.ndarray:
        pts = [tuple(start)]
        for y1 in y1_samples:
            lo, hi = self.q2_bounds(y1)
            pts.append((y1, 0.5 * (lo + hi)))
        return np.array(pts)

    def slow_path(self, waypoints: Optional[Sequence] = None, speed: float = 1.0) -> SlowPath:
        """Interpolating polynomial y2(y1) through the waypoints and the BT point."""
        wp = self.default_waypoints() if waypoints is None else np.asarray(waypoints, float)
        bt = self.bt_point()
        pts = np.vstack([wp, bt[None, :]])
        if np.any(np.diff(pts[:, 0]) <= 0):
            raise ValueError("waypoints must have increasing y1 below the BT point")
        poly = Polynomial.fit(pts[:, 0], pts[:, 1], len(pts) - 1).convert()
        return SlowPath(poly, float(pts[0, 0]), float(bt[0]), speed)

    def to_dict(self) -> dict:
        z = self.bt_state()
        return {"gamma": self.gamma, "xi": self.xi, "bt_point": z[2:].tolist(),
                "bt_state": z[:2].tolist(), "threshold": float(z[2])}


def bazykin(gamma: float = 1.0, xi: float = 0.01, eps: float = 3e-5,
            sigmas=(1e-3, 1e-3), waypoints=None, y1_stop: Optional[float] = None) -> ModelPreset:
    an = BazykinAnalytics(gamma, xi)
    path = an.slow_path(waypoints)
    dpoly = path.poly.deriv()
    sig = np.asarray(sigmas, float)

    def f(x, y):
        x1, x2 = x[:, 0], x[:, 1]
        q = x1 / (1.0 + y[:, 0] * x1)
        return np.stack([x1 - q * x2 - xi * x1 ** 2, -gamma * x2 + q * x2 - y[:, 1] * x2 ** 2], axis=1)

    def g(x, y):
        sp = path.speed
        return np.stack([np.full(len(y), sp), sp * dpoly(y[:, 0])], axis=1)

    Fd = np.diag(sig)

    def F(x, y):
        return np.broadcast_to(Fd, (x.shape[0], 2, 2))

    system = FastSlowSystem(2, 2, f, g, F, 2, eps, 1.0, name="Bazykin")
    y0 = np.array([path.y1_start, float(path.poly(path.y1_start))])
    x0 = an.attracting_equilibrium(y0)
    stop = path.y1_end if y1_stop is None else y1_stop
    return ModelPreset("Bazykin", {"gamma": gamma, "xi": xi, "eps": eps, "sigmas": sig.tolist()},
                       system, an, x0, y0,
                       {"dt": eps / 50.0, "stride": 10, "s_end": (stop - path.y1_start) / path.speed, "coord": 0,
                        "approach": "below", "slow_path": path,
                        "estimator": "m1", "window": 500, "detrend": "linear", "fit_range": (0.3, 0.44),
                        "laws": ("inv-rev", "inv-sqrt-rev")},
                       branch=an.attracting_equilibrium)
