"""Scalar fields fed to the nonlocal operator.

A field carries, besides its pointwise values, the metadata the singular
quadrature needs:

* ``growth``: exponent a_g such that the symmetric second difference about
  any fixed x is O(1 + |y|^{a_g}) for large |y|.  The far integral converges
  iff a_g < 2s, and the operator refuses otherwise.  For Hoelder-type fields
  this is the usual growth exponent; for affine fields it is 0 because the
  second difference cancels the linear part exactly.
* ``smooth_radius(x)``: distance from x to the nearest point where the field
  is not smooth (positivity kinks, domain boundaries); the near-field ball
  must stay inside it.
* ``radial_breakpoints(x, theta, r_max)``: radii r where u(x + r theta) or
  u(x - r theta) has a kink, so radial panels can be split there.
* ``angular_breakpoints(x)``: directions (angles mod pi) where the radial
  kink structure changes, so angular panels can be split there.
"""

import numpy as np

from .geometry import Ball, Cone, HalfPlane, StarShaped


class Field:
    growth = 0.0
    homogeneity = None  # degree of positive homogeneity about the origin, if any

    def __call__(self, pts):
        raise NotImplementedError

    def smooth_radius(self, x):
        return np.inf

    def radial_breakpoints(self, x, theta, r_max):
        return ()

    def angular_breakpoints(self, x):
        return ()


class ConstantField(Field):
    def __init__(self, value):
        self.value = float(value)
        self.homogeneity = 0.0

    def __call__(self, pts):
        pts = np.asarray(pts, dtype=float)
        return np.full(pts.shape[:-1], self.value)


class AffineField(Field):
    """c + b . x; growth 0 because second differences kill the linear part."""

    def __init__(self, b, c=0.0):
        self.b = np.atleast_1d(np.asarray(b, dtype=float))
        self.c = float(c)

    def __call__(self, pts):
        pts = np.asarray(pts, dtype=float)
        return pts @ self.b + self.c


class CallableField(Field):
    """Wrap a plain vectorized callable.

    Without a declared tail form the far field beyond the cutoff is only
    bounded, not integrated; declare ``growth`` honestly.
    """

    def __init__(self, fn, growth=0.0, smooth_radius_fn=None, homogeneity=None):
        self.fn = fn
        self.growth = float(growth)
        self._smooth_radius_fn = smooth_radius_fn
        self.homogeneity = homogeneity

    def __call__(self, pts):
        return np.asarray(self.fn(np.asarray(pts, dtype=float)), dtype=float)

    def smooth_radius(self, x):
        if self._smooth_radius_fn is None:
            return np.inf
        return float(self._smooth_radius_fn(np.asarray(x, dtype=float)))


class LinearCombinationField(Field):
    def __init__(self, coeffs, fields):
        self.coeffs = [float(c) for c in coeffs]
        self.fields = list(fields)
        self.growth = max(f.growth for f in self.fields)

    def __call__(self, pts):
        out = None
        for c, f in zip(self.coeffs, self.fields):
            v = c * f(pts)
            out = v if out is None else out + v
        return out

    def smooth_radius(self, x):
        return min(f.smooth_radius(x) for f in self.fields)

    def radial_breakpoints(self, x, theta, r_max):
        bps = []
        for f in self.fields:
            bps.extend(f.radial_breakpoints(x, theta, r_max))
        return tuple(sorted(bps))

    def angular_breakpoints(self, x):
        bps = []
        for f in self.fields:
            bps.extend(f.angular_breakpoints(x))
        return tuple(bps)


class TranslatedField(Field):
    """u(. - shift)."""

    def __init__(self, base, shift):
        self.base = base
        self.shift = np.atleast_1d(np.asarray(shift, dtype=float))
        self.growth = base.growth

    def __call__(self, pts):
        return self.base(np.asarray(pts, dtype=float) - self.shift)

    def smooth_radius(self, x):
        return self.base.smooth_radius(np.asarray(x, dtype=float) - self.shift)

    def radial_breakpoints(self, x, theta, r_max):
        return self.base.radial_breakpoints(
            np.asarray(x, dtype=float) - self.shift, theta, r_max)

    def angular_breakpoints(self, x):
        return self.base.angular_breakpoints(
            np.asarray(x, dtype=float) - self.shift)


def _wrap_angle_mod_pi(phi):
    return float(phi % np.pi)


class PowerPlus1D(Field):
    """((t + shift)_+)^alpha on the line; s-harmonic when alpha = s, shift-free
    version is positively homogeneous of degree alpha."""

    def __init__(self, alpha, shift=0.0):
        self.alpha = float(alpha)
        self.shift = float(shift)
        self.growth = float(alpha)
        self.homogeneity = float(alpha) if shift == 0.0 else None

    def __call__(self, pts):
        pts = np.asarray(pts, dtype=float)
        t = pts[..., 0] if pts.ndim > 1 else pts
        return np.maximum(t + self.shift, 0.0) ** self.alpha

    def smooth_radius(self, x):
        x = np.asarray(x, dtype=float).reshape(-1)
        return abs(float(x[0]) + self.shift)

    def radial_breakpoints(self, x, theta, r_max):
        x = np.asarray(x, dtype=float).reshape(-1)
        theta = np.asarray(theta, dtype=float).reshape(-1)
        b = float(x[0]) + self.shift
        w = float(theta[0])
        if w == 0.0:
            return ()
        r = abs(b / w)
        return (r,) if 0.0 < r <= r_max else ()


class HalfSpacePower(Field):
    """(x . nu)_+^alpha, the half-space barrier; homogeneous of degree alpha."""

    def __init__(self, nu, alpha):
        nu = np.atleast_1d(np.asarray(nu, dtype=float))
        self.nu = nu / np.linalg.norm(nu)
        self.alpha = float(alpha)
        self.growth = float(alpha)
        self.homogeneity = float(alpha)

    def __call__(self, pts):
        pts = np.asarray(pts, dtype=float)
        return np.maximum(pts @ self.nu, 0.0) ** self.alpha

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        h = float(x @ self.nu)
        if h <= 0.0:
            return np.zeros_like(self.nu)
        return self.alpha * h ** (self.alpha - 1.0) * self.nu

    def smooth_radius(self, x):
        return abs(float(np.asarray(x, dtype=float) @ self.nu))

    def radial_breakpoints(self, x, theta, r_max):
        b = float(np.asarray(x, dtype=float) @ self.nu)
        w = float(np.asarray(theta, dtype=float) @ self.nu)
        if w == 0.0:
            return ()
        r = abs(b / w)
        return (r,) if 0.0 < r <= r_max else ()

    def angular_breakpoints(self, x):
        # directions tangent to the kink plane
        if len(self.nu) != 2:
            return ()
        phi_nu = np.arctan2(self.nu[1], self.nu[0])
        return (_wrap_angle_mod_pi(phi_nu + 0.5 * np.pi),)


class PsiPower(Field):
    """psi(x)^alpha inside Omega, zero outside, with psi the regularized
    distance of a Ball, HalfPlane or StarShaped domain."""

    def __init__(self, domain, alpha):
        if not isinstance(domain, (Ball, HalfPlane, StarShaped)):
            raise TypeError("PsiPower needs a domain with a regularized distance")
        self.domain = domain
        self.alpha = float(alpha)
        self.growth = float(alpha) if isinstance(domain, HalfPlane) else 0.0
        self.homogeneity = float(alpha) if isinstance(domain, HalfPlane) else None

    def __call__(self, pts):
        psi = np.asarray(self.domain.psi_value(np.asarray(pts, dtype=float)))
        return np.maximum(psi, 0.0) ** self.alpha

    def smooth_radius(self, x):
        x = np.asarray(x, dtype=float)
        if isinstance(self.domain, Ball):
            return abs(self.domain.radius
                       - float(np.linalg.norm(x - self.domain.center)))
        if isinstance(self.domain, HalfPlane):
            return abs(float(x @ self.domain.normal))
        d = float(self.domain.dist(x))
        if d > 0.0:
            return d
        th = self.domain._project_param(x)
        return float(np.linalg.norm(self.domain.boundary_point(th) - x))

    def radial_breakpoints(self, x, theta, r_max):
        x = np.asarray(x, dtype=float)
        theta = np.asarray(theta, dtype=float)
        if isinstance(self.domain, HalfPlane):
            b = float(x @ self.domain.normal)
            w = float(theta @ self.domain.normal)
            if w == 0.0:
                return ()
            r = abs(b / w)
            return (r,) if 0.0 < r <= r_max else ()
        if isinstance(self.domain, Ball):
            # |x + r theta - c| = R along both +-theta: quadratic in r
            v = x - self.domain.center
            b = float(v @ theta)
            c = float(v @ v) - self.domain.radius ** 2
            disc = b * b - c
            if disc <= 0.0:
                return ()
            roots = np.array([-b - np.sqrt(disc), -b + np.sqrt(disc)])
            roots = np.abs(roots)  # kinks of u(x + r theta) and u(x - r theta)
            roots = sorted({float(r) for r in roots if 0.0 < r <= r_max})
            return tuple(roots)
        return _scan_breakpoints(
            lambda p: np.asarray(self.domain.radial(np.arctan2(p[..., 1], p[..., 0]))
                                 - np.linalg.norm(p, axis=-1)),
            x, theta, r_max)


class ConeBarrier(Field):
    """Phi_beta = (psi_+)^beta with psi(x) = e.x + eta |x| (1-(e.x)^2/|x|^2);
    positively homogeneous of degree beta, positive exactly on the cone."""

    def __init__(self, e, eta, beta):
        self.cone = Cone(e, eta)
        self.e = self.cone.axis
        self.eta = float(eta)
        self.beta = float(beta)
        self.growth = float(beta)
        self.homogeneity = float(beta)

    def side_function(self, pts):
        return self.cone.side_function(pts)

    def __call__(self, pts):
        psi = np.asarray(self.cone.side_function(np.asarray(pts, dtype=float)))
        return np.maximum(psi, 0.0) ** self.beta

    def smooth_radius(self, x):
        x = np.asarray(x, dtype=float)
        dists = []
        for w in self.cone.edge_dirs:
            t = max(float(x @ w), 0.0)
            dists.append(float(np.linalg.norm(x - t * w)))
        return min(dists)

    def radial_breakpoints(self, x, theta, r_max):
        x = np.asarray(x, dtype=float)
        theta = np.asarray(theta, dtype=float)
        roots = set()
        for sign in (1.0, -1.0):
            th = sign * theta
            for w in self.cone.edge_dirs:
                den = th[0] * w[1] - th[1] * w[0]
                if abs(den) < 1e-14:
                    continue
                r = (x[1] * w[0] - x[0] * w[1]) / den
                if 0.0 < r <= r_max:
                    t = float((x + r * th) @ w)
                    if t >= 0.0:
                        roots.add(float(r))
            # ray through the vertex
            cross = x[0] * th[1] - x[1] * th[0]
            along = -(x @ th)
            if abs(cross) < 1e-14 * max(1.0, np.linalg.norm(x)) and along > 0.0:
                if along <= r_max:
                    roots.add(float(along))
        return tuple(sorted(roots))

    def angular_breakpoints(self, x):
        x = np.asarray(x, dtype=float)
        out = [
            _wrap_angle_mod_pi(np.arctan2(w[1], w[0]))
            for w in self.cone.edge_dirs
        ]
        if np.linalg.norm(x) > 0:
            out.append(_wrap_angle_mod_pi(np.arctan2(x[1], x[0])))
        return tuple(out)


def _scan_breakpoints(side_fn, x, theta, r_max, n_probe=256):
    """Sign changes of a continuous side function along r -> x + r theta for
    both signs of theta, located by log-spaced probes plus bisection."""
    from scipy.optimize import brentq

    x = np.asarray(x, dtype=float)
    theta = np.asarray(theta, dtype=float)
    r_lo = 1e-9 * max(1.0, float(np.linalg.norm(x)))
    rr = np.geomspace(r_lo, r_max, n_probe)
    roots = set()
    for sign in (1.0, -1.0):
        pts = x[None, :] + sign * rr[:, None] * theta[None, :]
        vals = np.asarray(side_fn(pts))
        sgn = np.sign(vals)
        idx = np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]
        for i in idx:
            f = lambda r: float(side_fn((x + sign * r * theta)[None, :])[0])
            try:
                roots.add(float(brentq(f, rr[i], rr[i + 1], xtol=1e-13)))
            except ValueError:
                pass
    return tuple(sorted(roots))


class CompositeField(Field):
    """Value from ``inside`` on Omega and from ``outside`` elsewhere, with the
    domain boundary as the kink surface.  Used for the extended datum
    (harmonic extension inside, raw datum outside)."""

    def __init__(self, domain, inside, outside, growth):
        self.domain = domain
        self.inside = inside
        self.outside = outside
        self.growth = float(growth)

    def __call__(self, pts):
        pts = np.asarray(pts, dtype=float)
        single = pts.ndim == 1
        p = pts[None, :] if single else pts
        mask = np.asarray(self.domain.contains(p))
        out = np.empty(p.shape[0])
        if np.any(mask):
            out[mask] = self.inside(p[mask])
        if np.any(~mask):
            out[~mask] = self.outside(p[~mask])
        return float(out[0]) if single else out

    def smooth_radius(self, x):
        return float(self.domain.dist(np.asarray(x, dtype=float)))

    def radial_breakpoints(self, x, theta, r_max):
        dom = self.domain
        if isinstance(dom, Ball):
            return PsiPower(dom, 1.0).radial_breakpoints(x, theta, r_max)
        return _scan_breakpoints(lambda p: _signed_boundary_gap(dom, p),
                                 x, theta, r_max)


def _signed_boundary_gap(dom, pts):
    """Positive inside, negative outside, vanishing on the boundary."""
    pts = np.asarray(pts, dtype=float)
    inside = np.asarray(dom.contains(pts))
    if hasattr(dom, "_dist_to_edges"):
        gap = dom._dist_to_edges(pts)
    elif hasattr(dom, "psi_value"):
        return np.asarray(dom.psi_value(pts))
    else:
        gap = np.asarray(dom.dist(pts))
    return np.where(inside, gap, -gap)
