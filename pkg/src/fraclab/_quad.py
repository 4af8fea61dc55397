"""Quadrature building blocks for the singular-kernel integrals.

The radial direction of the operator integral is handled in three pieces:
a Gauss-Jacobi rule on the near ball that absorbs the r^{1-2s} behaviour of
the symmetrized integrand exactly, adaptive Gauss-Legendre panels on the mid
range with pre-splits at declared kink radii, and a Gauss-Jacobi rule in the
reciprocal variable for the tail, which absorbs the declared power growth.
Angular integration (dim 2) uses adaptive Clenshaw-Curtis panels whose
embedded coarse rule shares nodes with the fine one.
"""

from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

_GL16 = roots_legendre(16)
_GL8 = roots_legendre(8)


@lru_cache(maxsize=64)
def clenshaw_curtis(n):
    """Nodes (descending) and weights of the (n+1)-point CC rule on [-1,1].

    n must be even; the (n/2+1)-point rule uses every other node.
    """
    if n % 2 or n < 2:
        raise ValueError("n must be even and >= 2")
    j = np.arange(n + 1)
    theta = j * np.pi / n
    w = np.zeros(n + 1)
    w[0] = w[n] = 1.0 / (n ** 2 - 1.0)
    for jj in range(1, n):
        acc = 1.0
        for k in range(1, n // 2):
            acc -= 2.0 * np.cos(2.0 * k * theta[jj]) / (4.0 * k ** 2 - 1.0)
        acc -= np.cos(n * theta[jj]) / (n ** 2 - 1.0)
        w[jj] = 2.0 * acc / n
    return np.cos(theta), w


@lru_cache(maxsize=256)
def gauss_jacobi_01(n, beta):
    """Nodes/weights approximating int_0^1 t^beta f(t) dt = sum w f(t)."""
    x, w = roots_jacobi(n, 0.0, beta)
    return (x + 1.0) / 2.0, w * 0.5 ** (beta + 1.0)


def jacobi_pair(f, upper, n, beta):
    """Weighted integral int_0^upper t^beta f(t) dt with an embedded error
    estimate from the half-order rule.  f is vectorized."""
    t1, w1 = gauss_jacobi_01(n, beta)
    t0, w0 = gauss_jacobi_01(max(n // 2, 4), beta)
    scale = upper ** (beta + 1.0)
    nodes = np.concatenate([t1, t0]) * upper
    vals = f(nodes)
    v1 = scale * float(w1 @ vals[: len(t1)])
    v0 = scale * float(w0 @ vals[len(t1):])
    mass = scale * float(w1 @ np.abs(vals[: len(t1)]))
    return v1, abs(v1 - v0), mass, len(nodes)


class PanelSet:
    """Adaptive Gauss-Legendre panels with bisection refinement.

    Panels are evaluated in batches: each sweep gathers the nodes of all new
    panels into one call of the integrand.
    """

    def __init__(self, f, edges):
        self.f = f
        self.n_evals = 0
        self.panels = []  # (a, b, I16, err)
        self._add(list(zip(edges[:-1], edges[1:])))

    def _add(self, intervals):
        if not intervals:
            return
        a = np.array([p[0] for p in intervals])
        b = np.array([p[1] for p in intervals])
        mid = (a + b) / 2.0
        half = (b - a) / 2.0
        x16 = mid[:, None] + half[:, None] * _GL16[0][None, :]
        x8 = mid[:, None] + half[:, None] * _GL8[0][None, :]
        nodes = np.concatenate([x16.ravel(), x8.ravel()])
        vals = self.f(nodes)
        self.n_evals += len(nodes)
        m = len(intervals)
        v16 = vals[: 16 * m].reshape(m, 16)
        v8 = vals[16 * m:].reshape(m, 8)
        i16 = half * (v16 @ _GL16[1])
        i8 = half * (v8 @ _GL8[1])
        mass = half * (np.abs(v16) @ _GL16[1])
        for k in range(m):
            self.panels.append((a[k], b[k], float(i16[k]),
                                abs(float(i16[k] - i8[k])), float(mass[k])))

    @property
    def value(self):
        return float(sum(p[2] for p in self.panels))

    @property
    def err(self):
        return float(sum(p[3] for p in self.panels))

    @property
    def mass(self):
        return float(sum(p[4] for p in self.panels))

    def refine(self, tol_abs, max_panels, max_sweeps=40):
        for _ in range(max_sweeps):
            if self.err <= tol_abs or len(self.panels) >= max_panels:
                break
            errs = np.array([p[3] for p in self.panels])
            # split every panel holding more than its share of the budget
            cut = max(tol_abs / max(len(self.panels), 1), np.max(errs) * 0.25)
            idx = [i for i, p in enumerate(self.panels) if p[3] >= cut]
            if not idx:
                break
            room = max_panels - len(self.panels)
            idx = idx[:room]
            if not idx:
                break
            new = []
            for i in sorted(idx, reverse=True):
                a, b, _, _, _ = self.panels.pop(i)
                m = (a + b) / 2.0
                new.extend([(a, m), (m, b)])
            self._add(new)
        return self.value, self.err


def geometric_edges(a, b, n_min):
    """Log-spaced panel edges on [a, b] (a > 0), at least n_min panels and at
    least two panels per decade."""
    decades = np.log10(b / a)
    n = max(n_min, int(np.ceil(2.0 * decades)), 1)
    return np.geomspace(a, b, n + 1)


def merge_edges(edges, extra, lo, hi):
    pts = [e for e in extra if lo < e < hi]
    if not pts:
        return np.asarray(edges)
    merged = np.unique(np.concatenate([np.asarray(edges), np.asarray(pts)]))
    # drop near-duplicates that would create degenerate panels
    keep = [merged[0]]
    for e in merged[1:]:
        if e - keep[-1] > 1e-13 * max(abs(e), 1.0):
            keep.append(e)
    if keep[-1] < hi:
        keep.append(hi)
    return np.asarray(keep)


class RadialPiece:
    __slots__ = ("near", "far", "err", "mass", "n_evals")

    def __init__(self, near, far, err, mass, n_evals):
        self.near = near
        self.far = far
        self.err = err
        self.mass = mass
        self.n_evals = n_evals

    @property
    def total(self):
        return self.near + self.far


def radial_integral(pair_avg, u_x, s, rho, breakpoints, growth, far_cutoff,
                    rel_tol, n_jacobi, init_panels, max_panels):
    """One direction of the operator integral.

    pair_avg(r) = (u(x + r theta) + u(x - r theta)) / 2, vectorized.
    Returns the three-piece value of int_0^inf (u_x - pair_avg(r)) r^{-1-2s} dr
    split as near ([0, rho]) and far (the rest).
    """
    two_s = 2.0 * s

    # near ball: integrand = (delta u / r^2) * r^{1-2s}
    def g2(r):
        return (u_x - pair_avg(r)) / (r * r)

    near, err_near, mass_near, ev_near = jacobi_pair(g2, rho, n_jacobi, 1.0 - two_s)
    # translate the mass of g2 under weight back to integrand scale
    mass_near *= 1.0

    # far cutoff beyond every kink so the tail transform sees a smooth field
    bps = [b for b in breakpoints if b > 0.0]
    r_far = max(far_cutoff, 4.0 * rho)
    if bps:
        r_far = max(r_far, 2.0 * max(bps))

    def f_mid(r):
        return (u_x - pair_avg(r)) * r ** (-1.0 - two_s)

    edges = geometric_edges(rho, r_far, init_panels)
    edges = merge_edges(edges, bps, rho, r_far)
    ps = PanelSet(f_mid, edges)
    # the near and mid pieces largely cancel for nearly harmonic fields, so
    # the integrand mass, not the value, sets the relative-error scale
    scale0 = max(abs(near + ps.value), 0.25 * (mass_near + ps.mass), 1e-300)
    ps.refine(tol_abs=rel_tol * scale0, max_panels=max_panels)
    mid, err_mid = ps.value, ps.err

    # tail: u_x term is exact; the pair average is transformed by t = R/r so
    # that t^{growth} * pair_avg(R/t) is smooth and the Jacobi weight
    # t^{2s-1-growth} carries the power law.
    beta_tail = two_s - 1.0 - growth

    def h_tail(t):
        return pair_avg(r_far / t) * t ** growth

    tail_pair, err_tail, mass_tail, ev_tail = jacobi_pair(
        h_tail, 1.0, n_jacobi, beta_tail)
    tail = u_x * r_far ** (-two_s) / two_s - r_far ** (-two_s) * tail_pair
    err_tail *= r_far ** (-two_s)
    mass_tail *= r_far ** (-two_s)

    err = err_near + err_mid + err_tail
    mass = mass_near + ps.mass + mass_tail + abs(u_x) * r_far ** (-two_s) / two_s
    return RadialPiece(near=near, far=mid + tail, err=err, mass=mass,
                       n_evals=ev_near + ps.n_evals + ev_tail)
