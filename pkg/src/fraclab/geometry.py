"""Geometric domains with distance, projection and regularized distance.

All variants expose vectorized ``contains``/``dist`` over point batches of
shape (n, dim) (single points of shape (dim,) also accepted) and a pointwise
``project`` returning the nearest boundary point together with the inward
unit normal.  Ball, HalfPlane and StarShaped additionally provide a C^1
regularized distance psi comparable to d with a Hessian controlled by
omega(d)/d.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError, UnsupportedVariantError


def _as_points(x, dim):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        if x.shape[0] != dim:
            raise ParameterError(f"point has dim {x.shape[0]}, domain has dim {dim}")
        return x[None, :], True
    if x.shape[-1] != dim:
        raise ParameterError(f"points have dim {x.shape[-1]}, domain has dim {dim}")
    return x, False


def _maybe_scalar(v, single):
    return (v[0] if single else v)


@dataclass(frozen=True)
class RegularizedDistance:
    """Value, gradient and Hessian of psi at one point, plus the modulus
    value omega(d) entering the Hessian bound |D^2 psi| <= omega(d)/d."""
    psi: float
    grad: np.ndarray
    hess: np.ndarray
    omega_bound: float


class Domain:
    """Base class; concrete variants implement the geometry services."""

    dim = 2
    bounded = True

    def contains(self, x):
        raise NotImplementedError

    def dist(self, x):
        raise NotImplementedError

    def project(self, x):
        raise NotImplementedError

    def regularized_distance(self, x):
        raise UnsupportedVariantError(
            f"{type(self).__name__} has no regularized distance")

    @property
    def diameter(self):
        raise UnsupportedVariantError(f"{type(self).__name__} is unbounded")


class Ball(Domain):
    def __init__(self, center, radius, dim=None):
        center = np.atleast_1d(np.asarray(center, dtype=float))
        if radius <= 0:
            raise ParameterError("ball radius must be positive")
        self.center = center
        self.radius = float(radius)
        self.dim = len(center) if dim is None else int(dim)
        if len(self.center) != self.dim:
            raise ParameterError("center length must match dim")

    @property
    def diameter(self):
        return 2.0 * self.radius

    def contains(self, x):
        pts, single = _as_points(x, self.dim)
        r = np.linalg.norm(pts - self.center, axis=-1)
        return _maybe_scalar(r < self.radius, single)

    def dist(self, x):
        pts, single = _as_points(x, self.dim)
        r = np.linalg.norm(pts - self.center, axis=-1)
        return _maybe_scalar(np.maximum(self.radius - r, 0.0), single)

    def project(self, x):
        x = np.asarray(x, dtype=float)
        v = x - self.center
        r = np.linalg.norm(v)
        if r >= self.radius:
            raise DomainError("project requires an interior point")
        if r == 0.0:
            direction = np.zeros(self.dim)
            direction[0] = 1.0
        else:
            direction = v / r
        z0 = self.center + self.radius * direction
        return z0, -direction

    def psi_value(self, x):
        """Regularized distance value, vectorized; negative outside Omega."""
        pts, single = _as_points(x, self.dim)
        v = pts - self.center
        psi = (self.radius ** 2 - np.sum(v * v, axis=-1)) / (2.0 * self.radius)
        return _maybe_scalar(psi, single)

    def regularized_distance(self, x):
        x = np.asarray(x, dtype=float)
        if not self.contains(x):
            raise DomainError("regularized distance requires an interior point")
        v = x - self.center
        R = self.radius
        psi = (R ** 2 - v @ v) / (2.0 * R)
        grad = -v / R
        hess = -np.eye(self.dim) / R
        d = self.dist(x)
        # |D^2 psi| = 1/R, so omega(r) = r/R works (gamma = 1, C = 1/R)
        return RegularizedDistance(psi=float(psi), grad=grad, hess=hess,
                                   omega_bound=float(d / R))


class HalfPlane(Domain):
    """Omega = {x : e . x > 0} with e the inward unit normal."""

    bounded = False

    def __init__(self, normal):
        normal = np.atleast_1d(np.asarray(normal, dtype=float))
        n = np.linalg.norm(normal)
        if n == 0:
            raise ParameterError("normal must be nonzero")
        self.normal = normal / n
        self.dim = len(self.normal)

    def contains(self, x):
        pts, single = _as_points(x, self.dim)
        return _maybe_scalar(pts @ self.normal > 0.0, single)

    def dist(self, x):
        pts, single = _as_points(x, self.dim)
        return _maybe_scalar(np.maximum(pts @ self.normal, 0.0), single)

    def project(self, x):
        x = np.asarray(x, dtype=float)
        h = x @ self.normal
        if h <= 0:
            raise DomainError("project requires an interior point")
        return x - h * self.normal, self.normal.copy()

    def psi_value(self, x):
        pts, single = _as_points(x, self.dim)
        return _maybe_scalar(pts @ self.normal, single)

    def regularized_distance(self, x):
        x = np.asarray(x, dtype=float)
        if not self.contains(x):
            raise DomainError("regularized distance requires an interior point")
        return RegularizedDistance(
            psi=float(x @ self.normal), grad=self.normal.copy(),
            hess=np.zeros((self.dim, self.dim)), omega_bound=0.0)


class Cone(Domain):
    """The open cone C_{-eta}: (e.x)/|x| > -eta (1 - (e.x)^2/|x|^2).

    Unbounded and Lipschitz; used as the comparison region for the cone
    barrier.  dim 2 only.
    """

    bounded = False
    dim = 2

    def __init__(self, axis, eta):
        axis = np.atleast_1d(np.asarray(axis, dtype=float))
        if len(axis) != 2:
            raise ParameterError("cone axis must be 2-dimensional")
        n = np.linalg.norm(axis)
        if n == 0:
            raise ParameterError("axis must be nonzero")
        if eta <= 0:
            raise ParameterError("eta must be positive")
        self.axis = axis / n
        self.eta = float(eta)
        # psi(x) = e.x + eta |x| (1 - (e.x)^2/|x|^2) vanishes on the boundary
        # rays at polar angle +-gamma* from the axis: solve c + eta(1-c^2) = 0.
        c = (1.0 - np.sqrt(1.0 + 4.0 * self.eta ** 2)) / (2.0 * self.eta)
        self.half_opening = float(np.arccos(c))  # in (pi/2, pi)
        base = np.arctan2(self.axis[1], self.axis[0])
        self.edge_dirs = np.stack([
            [np.cos(base + self.half_opening), np.sin(base + self.half_opening)],
            [np.cos(base - self.half_opening), np.sin(base - self.half_opening)],
        ])

    def side_function(self, x):
        """psi(x); positive inside the cone, zero on its boundary."""
        pts, single = _as_points(x, 2)
        r = np.linalg.norm(pts, axis=-1)
        p = pts @ self.axis
        with np.errstate(invalid="ignore", divide="ignore"):
            val = p + self.eta * (r - p ** 2 / r)
        val = np.where(r == 0.0, 0.0, val)
        return _maybe_scalar(val, single)

    def contains(self, x):
        pts, single = _as_points(x, 2)
        return _maybe_scalar(np.asarray(self.side_function(pts)) > 0.0, single)

    def dist(self, x):
        pts, single = _as_points(x, 2)
        inside = np.asarray(self.side_function(pts)) > 0.0
        d = np.full(pts.shape[0], 0.0)
        if np.any(inside):
            sub = pts[inside]
            dists = []
            for w in self.edge_dirs:
                t = np.clip(sub @ w, 0.0, None)
                foot = t[:, None] * w[None, :]
                dists.append(np.linalg.norm(sub - foot, axis=-1))
            d[inside] = np.minimum(dists[0], dists[1])
        return _maybe_scalar(d, single)

    def project(self, x):
        x = np.asarray(x, dtype=float)
        if not self.contains(x):
            raise DomainError("project requires an interior point")
        best = None
        for w in self.edge_dirs:
            t = max(float(x @ w), 0.0)
            foot = t * w
            dd = float(np.linalg.norm(x - foot))
            if best is None or dd < best[0]:
                best = (dd, foot)
        z0 = best[1]
        if np.linalg.norm(z0) == 0.0:
            normal = self.axis.copy()  # vertex: bisector = axis
        else:
            v = x - z0
            normal = v / np.linalg.norm(v)
        return z0, normal


class Polygon(Domain):
    """Simple polygon given by counterclockwise vertices, shape (m, 2)."""

    dim = 2

    def __init__(self, vertices):
        verts = np.asarray(vertices, dtype=float)
        if verts.ndim != 2 or verts.shape[1] != 2 or verts.shape[0] < 3:
            raise ParameterError("polygon needs at least 3 planar vertices")
        area2 = float(np.sum(verts[:, 0] * np.roll(verts[:, 1], -1)
                             - np.roll(verts[:, 0], -1) * verts[:, 1]))
        if abs(area2) < 1e-14:
            raise ParameterError("polygon is degenerate")
        if area2 < 0:
            verts = verts[::-1].copy()
        self.vertices = verts
        self._a = verts
        self._b = np.roll(verts, -1, axis=0)
        self._edge = self._b - self._a
        self._len2 = np.sum(self._edge ** 2, axis=1)
        if np.any(self._len2 == 0.0):
            raise ParameterError("polygon has a zero-length edge")

    @property
    def diameter(self):
        v = self.vertices
        return float(np.max(np.linalg.norm(v[:, None, :] - v[None, :, :], axis=-1)))

    def lipschitz_constant(self):
        """Graph constant of the boundary, max over corners of cot(theta/2)
        with theta the smaller of the interior/exterior corner angle."""
        prev = self.vertices - np.roll(self.vertices, 1, axis=0)
        nxt = np.roll(self.vertices, -1, axis=0) - self.vertices
        worst = 0.0
        for u, v in zip(prev, nxt):
            cosang = -(u @ v) / (np.linalg.norm(u) * np.linalg.norm(v))
            ang = np.arccos(np.clip(cosang, -1.0, 1.0))
            ang = min(ang, 2.0 * np.pi - ang)
            worst = max(worst, 1.0 / np.tan(ang / 2.0))
        return float(worst)

    def contains(self, x):
        pts, single = _as_points(x, 2)
        # crossing-number test, vectorized over points x edges
        ax = self._a[None, :, 0]; ay = self._a[None, :, 1]
        bx = self._b[None, :, 0]; by = self._b[None, :, 1]
        px = pts[:, 0:1]; py = pts[:, 1:2]
        cond = (ay > py) != (by > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            xin = ax + (py - ay) * (bx - ax) / (by - ay)
        crossing = cond & (px < xin)
        inside = np.sum(crossing, axis=1) % 2 == 1
        on_edge = self._dist_to_edges(pts) < 1e-14
        return _maybe_scalar(inside & ~on_edge, single)

    def _dist_to_edges(self, pts):
        w = pts[:, None, :] - self._a[None, :, :]
        t = np.clip(np.einsum("pek,ek->pe", w, self._edge) / self._len2, 0.0, 1.0)
        foot = self._a[None, :, :] + t[:, :, None] * self._edge[None, :, :]
        return np.min(np.linalg.norm(pts[:, None, :] - foot, axis=-1), axis=1)

    def dist(self, x):
        pts, single = _as_points(x, 2)
        d = self._dist_to_edges(pts)
        inside = np.asarray(self.contains(pts))
        return _maybe_scalar(np.where(inside, d, 0.0), single)

    def project(self, x):
        x = np.asarray(x, dtype=float)
        if not self.contains(x):
            raise DomainError("project requires an interior point")
        w = x[None, :] - self._a
        t = np.clip(np.sum(w * self._edge, axis=1) / self._len2, 0.0, 1.0)
        foot = self._a + t[:, None] * self._edge
        dd = np.linalg.norm(x - foot, axis=1)
        k = int(np.argmin(dd))
        z0 = foot[k]
        d = dd[k]
        ties = np.nonzero(dd <= d * (1.0 + 1e-9) + 1e-15)[0]
        at_vertex = t[k] in (0.0, 1.0) or len(ties) > 1
        if at_vertex:
            normal = (x - z0) / d  # corner: direction to x is the bisector ray
        else:
            e = self._edge[k] / np.sqrt(self._len2[k])
            normal = np.array([-e[1], e[0]])  # inward for ccw orientation
        return z0, normal


class StarShaped(Domain):
    """Star-shaped (about the origin) C^{1,gamma} domain r(theta) given by a
    finite cosine/sine series; r(theta) >= r_min > 0 is required."""

    dim = 2

    def __init__(self, coeff_cos, coeff_sin=(), gamma=1.0):
        self.coeff_cos = np.atleast_1d(np.asarray(coeff_cos, dtype=float))
        self.coeff_sin = np.atleast_1d(np.asarray(coeff_sin, dtype=float)) \
            if len(coeff_sin) else np.zeros(0)
        if gamma <= 0 or gamma > 1:
            raise ParameterError("gamma must lie in (0, 1]")
        self.gamma = float(gamma)
        th = np.linspace(0.0, 2.0 * np.pi, 4096, endpoint=False)
        rr = self.radial(th)
        self.r_min = float(np.min(rr))
        self.r_max = float(np.max(rr))
        if self.r_min <= 0:
            raise ParameterError("radial profile must stay positive")
        self._omega_const = None

    @property
    def diameter(self):
        return 2.0 * self.r_max

    def radial(self, theta, order=0):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros_like(theta)
        for k, c in enumerate(self.coeff_cos):
            kk = float(k)
            if order == 0:
                out += c * np.cos(kk * theta)
            elif order == 1:
                out += -c * kk * np.sin(kk * theta)
            else:
                out += -c * kk ** 2 * np.cos(kk * theta)
        for k, c in enumerate(self.coeff_sin, start=1):
            kk = float(k)
            if order == 0:
                out += c * np.sin(kk * theta)
            elif order == 1:
                out += c * kk * np.cos(kk * theta)
            else:
                out += -c * kk ** 2 * np.sin(kk * theta)
        return out

    def contains(self, x):
        pts, single = _as_points(x, 2)
        th = np.arctan2(pts[:, 1], pts[:, 0])
        r = np.linalg.norm(pts, axis=-1)
        return _maybe_scalar(r < self.radial(th), single)

    def boundary_point(self, theta):
        r = self.radial(theta)
        return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)

    def _project_param(self, x):
        """Boundary parameter minimizing |x - B(theta)| by damped Newton on a
        coarse-scan bracket, with golden-section fallback."""
        x = np.asarray(x, dtype=float)
        grid = np.linspace(0.0, 2.0 * np.pi, 512, endpoint=False)
        bp = self.boundary_point(grid)
        d2 = np.sum((bp - x) ** 2, axis=1)
        k = int(np.argmin(d2))
        tol = 1e-12 * self.diameter

        def dist2(th):
            b = self.boundary_point(np.atleast_1d(th))[0]
            return float((b[0] - x[0]) ** 2 + (b[1] - x[1]) ** 2)

        def ddist2(th):
            r = self.radial(th); rp = self.radial(th, 1)
            c, s = np.cos(th), np.sin(th)
            bx, by = r * c, r * s
            dbx = rp * c - r * s
            dby = rp * s + r * c
            return 2.0 * ((bx - x[0]) * dbx + (by - x[1]) * dby)

        def d2dist2(th):
            r = self.radial(th); rp = self.radial(th, 1); rpp = self.radial(th, 2)
            c, s = np.cos(th), np.sin(th)
            bx, by = r * c, r * s
            dbx = rp * c - r * s
            dby = rp * s + r * c
            d2bx = rpp * c - 2 * rp * s - r * c
            d2by = rpp * s + 2 * rp * c - r * s
            return 2.0 * (dbx ** 2 + dby ** 2
                          + (bx - x[0]) * d2bx + (by - x[1]) * d2by)

        th = grid[k]
        for _ in range(60):
            g = ddist2(th)
            h = d2dist2(th)
            if h <= 0:
                break
            step = g / h
            # damping: never jump past the neighbouring grid cells
            step = np.clip(step, -2 * np.pi / 256, 2 * np.pi / 256)
            th_new = th - step
            if dist2(th_new) <= dist2(th):
                th = th_new
            else:
                break
            if abs(step) * self.r_max < tol:
                return th
        # golden-section fallback on the bracketing cell
        lo = grid[k] - 2.0 * np.pi / 512
        hi = grid[k] + 2.0 * np.pi / 512
        invphi = (np.sqrt(5.0) - 1.0) / 2.0
        a, b = lo, hi
        c1 = b - invphi * (b - a)
        c2 = a + invphi * (b - a)
        f1, f2 = dist2(c1), dist2(c2)
        while (b - a) * self.r_max > tol:
            if f1 < f2:
                b, c2, f2 = c2, c1, f1
                c1 = b - invphi * (b - a)
                f1 = dist2(c1)
            else:
                a, c1, f1 = c1, c2, f2
                c2 = a + invphi * (b - a)
                f2 = dist2(c2)
        return 0.5 * (a + b)

    def _dist_batch(self, pts):
        """Distance to the boundary for a batch: coarse grid argmin, then a
        fixed number of damped vectorized Newton steps on the squared
        distance along the boundary parameter."""
        n_grid = 256
        grid = np.linspace(0.0, 2.0 * np.pi, n_grid, endpoint=False)
        B = self.boundary_point(grid)
        cell = 2.0 * np.pi / n_grid
        out = np.empty(pts.shape[0])
        for lo in range(0, pts.shape[0], 8192):
            p = pts[lo:lo + 8192]
            d2 = (np.sum(p ** 2, axis=1)[:, None]
                  + np.sum(B ** 2, axis=1)[None, :] - 2.0 * (p @ B.T))
            th = grid[np.argmin(d2, axis=1)]
            for _ in range(30):
                r = self.radial(th); rp = self.radial(th, 1)
                rpp = self.radial(th, 2)
                c, s = np.cos(th), np.sin(th)
                bx, by = r * c, r * s
                dbx = rp * c - r * s
                dby = rp * s + r * c
                d2bx = rpp * c - 2 * rp * s - r * c
                d2by = rpp * s + 2 * rp * c - r * s
                ex, ey = bx - p[:, 0], by - p[:, 1]
                g1 = 2.0 * (ex * dbx + ey * dby)
                h1 = 2.0 * (dbx ** 2 + dby ** 2 + ex * d2bx + ey * d2by)
                step = np.where(h1 > 0.0, g1 / np.maximum(h1, 1e-300), 0.0)
                step = np.clip(step, -cell, cell)
                th = th - step
                if np.max(np.abs(step)) * self.r_max < 1e-13 * self.diameter:
                    break
            bp = self.boundary_point(th)
            out[lo:lo + 8192] = np.linalg.norm(bp - p, axis=1)
        return out

    def dist(self, x):
        pts, single = _as_points(x, 2)
        out = np.zeros(pts.shape[0])
        inside = np.asarray(self.contains(pts))
        if np.any(inside):
            out[inside] = self._dist_batch(pts[inside])
        return _maybe_scalar(out, single)

    def project(self, x):
        x = np.asarray(x, dtype=float)
        if not self.contains(x):
            raise DomainError("project requires an interior point")
        th = self._project_param(x)
        z0 = self.boundary_point(th)
        v = x - z0
        n = np.linalg.norm(v)
        if n == 0:
            r = self.radial(th); rp = self.radial(th, 1)
            tangent = np.array([rp * np.cos(th) - r * np.sin(th),
                                rp * np.sin(th) + r * np.cos(th)])
            tangent /= np.linalg.norm(tangent)
            normal = np.array([-tangent[1], tangent[0]])
            if normal @ z0 > 0:
                normal = -normal
            return z0, normal
        return z0, v / n

    # --- regularized distance: flattened radial gap ----------------------
    # psi = h(rho) with rho(x) = r(theta_x) - |x|; h is the identity near the
    # boundary and flattens to a constant before the origin, so psi is C^2 on
    # all of Omega while psi ~ d near the boundary.

    def _gap_cut(self):
        return self.r_min / 3.0, 2.0 * self.r_min / 3.0

    def _h(self, rho):
        r1, r2 = self._gap_cut()
        if rho <= r1:
            return rho, 1.0, 0.0
        if rho >= r2:
            # value of the blend at r2 (constant beyond)
            hv, _, _ = self._h(r2 - 1e-15)
            return hv, 0.0, 0.0
        # quintic smoothstep of the derivative from 1 down to 0 on [r1, r2]
        t = (rho - r1) / (r2 - r1)
        blend = 1.0 - (10 * t ** 3 - 15 * t ** 4 + 6 * t ** 5)
        dblend = -(30 * t ** 2 - 60 * t ** 3 + 30 * t ** 4) / (r2 - r1)
        # h(rho) = r1 + int_{r1}^{rho} blend
        sint = (rho - r1) - (10 / 4 * t ** 4 - 15 / 5 * t ** 5 + 6 / 6 * t ** 6) * (r2 - r1)
        return r1 + sint, blend, dblend

    def _gap(self, x):
        th = np.arctan2(x[1], x[0])
        rr = np.linalg.norm(x)
        r = self.radial(th); rp = self.radial(th, 1); rpp = self.radial(th, 2)
        if rr == 0.0:
            return r, None, None
        # gradients of theta and |x|
        gth = np.array([-x[1], x[0]]) / rr ** 2
        grr = x / rr
        grad = rp * gth - grr
        hth = (np.array([[2 * x[0] * x[1], x[1] ** 2 - x[0] ** 2],
                         [x[1] ** 2 - x[0] ** 2, -2 * x[0] * x[1]]]) / rr ** 4)
        hrr = (np.eye(2) - np.outer(x, x) / rr ** 2) / rr
        hess = (rpp * np.outer(gth, gth) + rp * hth - hrr)
        return r - rr, grad, hess

    def omega_constant(self):
        """Empirical constant C with |D^2 psi| <= C d^{gamma-1}, from a
        sampled sup with modest headroom (cached per domain)."""
        if self._omega_const is None:
            rng = np.random.Generator(np.random.Philox(key=7))
            worst = 1e-12
            n = 0
            while n < 2000:
                p = (rng.random(2) * 2.0 - 1.0) * self.r_max
                if not self.contains(p):
                    continue
                n += 1
                d = float(self.dist(p))
                if d <= 0:
                    continue
                rd = self._reg(p)
                worst = max(worst, float(np.linalg.norm(rd[2], 2)) * d ** (1.0 - self.gamma))
            self._omega_const = 1.15 * worst
        return self._omega_const

    def _reg(self, x):
        rho, grho, hrho = self._gap(x)
        hv, hp, hpp = self._h(rho)
        grad = hp * grho
        hess = hpp * np.outer(grho, grho) + hp * hrho
        return hv, grad, hess

    def psi_value(self, x):
        pts, single = _as_points(x, 2)
        th = np.arctan2(pts[:, 1], pts[:, 0])
        rho = self.radial(th) - np.linalg.norm(pts, axis=-1)
        r1, r2 = self._gap_cut()
        flat, _, _ = self._h(r2)
        t = np.clip((rho - r1) / (r2 - r1), 0.0, 1.0)
        sint = (rho - r1) - (2.5 * t ** 4 - 3.0 * t ** 5 + t ** 6) * (r2 - r1)
        out = np.where(rho <= r1, rho, np.where(rho >= r2, flat, r1 + sint))
        return _maybe_scalar(out, single)

    def regularized_distance(self, x):
        x = np.asarray(x, dtype=float)
        if not self.contains(x):
            raise DomainError("regularized distance requires an interior point")
        if np.linalg.norm(x) == 0.0:
            r1, r2 = self._gap_cut()
            hv, _, _ = self._h(r2)
            return RegularizedDistance(psi=hv, grad=np.zeros(2),
                                       hess=np.zeros((2, 2)),
                                       omega_bound=0.0)
        hv, grad, hess = self._reg(x)
        d = float(self.dist(x))
        omega = self.omega_constant() * d ** self.gamma
        return RegularizedDistance(psi=float(hv), grad=grad, hess=hess,
                                   omega_bound=float(omega))


# ---------------------------------------------------------------------------
# spec-shaped module-level operations

def contains(dom, x):
    return dom.contains(x)


def dist(dom, x):
    return dom.dist(x)


def project(dom, x):
    return dom.project(x)


def regularized_distance(dom, x):
    return dom.regularized_distance(x)


def domain_from_config(cfg):
    """Domain config records, one key per variant:
    {"ball": {"center": [..], "radius": r}}, {"halfplane": {"normal": [..]}},
    {"cone": {"axis": [..], "eta": e}}, {"polygon": {"vertices": [[..]..]}},
    {"star": {"coeff_cos": [..], "coeff_sin": [..], "gamma": g}}.
    """
    if len(cfg) != 1:
        raise ParameterError("domain config must have exactly one variant key")
    (kind, body), = cfg.items()
    if kind == "ball":
        return Ball(body["center"], body["radius"])
    if kind == "halfplane":
        return HalfPlane(body["normal"])
    if kind == "cone":
        return Cone(body["axis"], body["eta"])
    if kind == "polygon":
        return Polygon(body["vertices"])
    if kind == "star":
        return StarShaped(body["coeff_cos"], body.get("coeff_sin", ()),
                          gamma=body.get("gamma", 1.0))
    raise ParameterError(f"unknown domain variant {kind!r}")


def domain_to_config(dom):
    if isinstance(dom, Ball):
        return {"ball": {"center": dom.center.tolist(), "radius": dom.radius}}
    if isinstance(dom, HalfPlane):
        return {"halfplane": {"normal": dom.normal.tolist()}}
    if isinstance(dom, Cone):
        return {"cone": {"axis": dom.axis.tolist(), "eta": dom.eta}}
    if isinstance(dom, Polygon):
        return {"polygon": {"vertices": dom.vertices.tolist()}}
    if isinstance(dom, StarShaped):
        return {"star": {"coeff_cos": dom.coeff_cos.tolist(),
                         "coeff_sin": dom.coeff_sin.tolist(),
                         "gamma": dom.gamma}}
    raise ParameterError(f"cannot serialize {type(dom).__name__}")


def unit_square():
    return Polygon([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
