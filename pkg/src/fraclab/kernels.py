"""Admissible kernel class for the nonlocal operator.

A kernel is K(y) = a(y/|y|) * |y|^(-N-2s) with a symmetric angular density
a bounded between two ellipticity constants.  The isotropic case a == 1 is
the fractional Laplacian up to a positive constant; we fix the convention
that no such constant is carried, so every downstream check is built on
signs, zeros, ratios and homogeneity exponents, all invariant under a
positive rescaling of the operator.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ParameterError, SingularityError


def _ones_density(theta):
    theta = np.asarray(theta, dtype=float)
    return np.ones(theta.shape[:-1])


@dataclass(frozen=True)
class KernelSpec:
    """Kernel of order s with angular density a and ellipticity pair (lam, Lam).

    ``angular_density`` maps unit vectors, shaped (..., dim), to values
    (...,).  It must be even and take values in [lam, Lam]; this is checked
    by sampling via :func:`validate_kernel`, not enforced symbolically.
    """

    s: float
    dim: int
    lam: float
    Lam: float
    angular_density: Callable = field(default=_ones_density, repr=False)
    homogeneous: bool = True
    name: str = "custom"

    def __post_init__(self):
        if not 0.0 < self.s < 1.0:
            raise ParameterError(f"order s must lie in (0,1), got {self.s}")
        if self.dim < 1:
            raise ParameterError(f"dimension must be >= 1, got {self.dim}")
        if not 0.0 < self.lam <= self.Lam:
            raise ParameterError(
                f"ellipticity must satisfy 0 < lam <= Lam, got ({self.lam}, {self.Lam})"
            )


def make_fractional_laplacian(s, dim):
    """Kernel of the fractional Laplacian: a == 1, lam = Lam = 1.

    No normalizing constant is applied (see module docstring).
    """
    if not isinstance(dim, (int, np.integer)):
        raise ParameterError(f"dimension must be an integer, got {dim!r}")
    return KernelSpec(s=float(s), dim=int(dim), lam=1.0, Lam=1.0,
                      angular_density=_ones_density, homogeneous=True,
                      name="frac_lap")


def kernel_eval(kernel, y):
    """Evaluate K(y) = a(y/|y|) |y|^(-N-2s) at one point or a batch.

    ``y`` has shape (dim,) or (n, dim); y = 0 raises a singularity error.
    """
    y = np.asarray(y, dtype=float)
    single = y.ndim == 1
    pts = y[None, :] if single else y
    r = np.linalg.norm(pts, axis=-1)
    if np.any(r == 0.0):
        raise SingularityError("kernel is singular at y = 0")
    vals = kernel.angular_density(pts / r[:, None]) * r ** (-kernel.dim - 2.0 * kernel.s)
    return float(vals[0]) if single else vals


def _sphere_directions(dim, n, seed=0):
    """Quasi-random directions on the unit sphere.

    dim 1: alternating signs; dim 2: golden-angle sequence; higher dims fall
    back to a seeded Gaussian normalized to the sphere.
    """
    if dim == 1:
        return np.where(np.arange(n)[:, None] % 2 == 0, 1.0, -1.0)
    if dim == 2:
        golden = np.pi * (3.0 - np.sqrt(5.0))
        phi = golden * np.arange(n)
        return np.stack([np.cos(phi), np.sin(phi)], axis=1)
    rng = np.random.Generator(np.random.Philox(key=seed))
    v = rng.standard_normal((n, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


@dataclass(frozen=True)
class KernelValidation:
    samples: int
    max_symmetry_violation: float
    worst_lower_margin: float   # min a(theta) - lam; negative means violated
    worst_upper_margin: float   # min Lam - a(theta); negative means violated
    symmetry_ok: bool
    bounds_ok: bool

    @property
    def ok(self):
        return self.symmetry_ok and self.bounds_ok


def validate_kernel(kernel, samples=1000, seed=0, tol=1e-12):
    """Sample the angular density and report symmetry / ellipticity margins.

    Violations are reported, never raised.
    """
    if samples < 1:
        raise ParameterError("samples must be >= 1")
    theta = _sphere_directions(kernel.dim, samples, seed=seed)
    a_plus = np.asarray(kernel.angular_density(theta), dtype=float)
    a_minus = np.asarray(kernel.angular_density(-theta), dtype=float)
    sym = float(np.max(np.abs(a_plus - a_minus))) if samples else 0.0
    both = np.concatenate([a_plus, a_minus])
    lower = float(np.min(both - kernel.lam))
    upper = float(np.min(kernel.Lam - both))
    return KernelValidation(
        samples=samples,
        max_symmetry_violation=sym,
        worst_lower_margin=lower,
        worst_upper_margin=upper,
        symmetry_ok=sym <= tol,
        bounds_ok=(lower >= -tol) and (upper >= -tol),
    )


def _cos_even_density(coefficients):
    coeffs = [float(c) for c in coefficients]

    def density(theta):
        theta = np.asarray(theta, dtype=float)
        phi = np.arctan2(theta[..., 1], theta[..., 0])
        out = np.full(theta.shape[:-1], coeffs[0])
        for k, c in enumerate(coefficients[1:], start=1):
            out = out + c * np.cos(2 * k * phi)
        return out

    return density


def kernel_from_config(cfg):
    """Build a KernelSpec from a config record.

    Records: {"type": "frac_lap", "s": .., "dim": ..} or
    {"type": "custom", "s", "dim", "lambda", "Lambda",
     "angular": {"cos_even": [c0, c2, c4, ...]}} where the angular density is
    the even cosine series c0 + c2 cos(2 phi) + ... (symmetric by construction,
    dim 2 only).
    """
    kind = cfg.get("type", "frac_lap")
    if kind == "frac_lap":
        return make_fractional_laplacian(cfg["s"], int(cfg.get("dim", 2)))
    if kind == "custom":
        angular = cfg.get("angular", {})
        coeffs = angular.get("cos_even")
        if coeffs is None:
            raise ParameterError("custom kernel config needs angular.cos_even")
        if int(cfg.get("dim", 2)) != 2:
            raise ParameterError("cos_even angular densities are dim-2 only")
        return KernelSpec(
            s=float(cfg["s"]), dim=2,
            lam=float(cfg["lambda"]), Lam=float(cfg["Lambda"]),
            angular_density=_cos_even_density(coeffs),
            homogeneous=True, name="custom",
        )
    raise ParameterError(f"unknown kernel type {kind!r}")


def kernel_to_config(kernel, angular_coeffs=None):
    if kernel.name == "frac_lap":
        return {"type": "frac_lap", "s": kernel.s, "dim": kernel.dim}
    cfg = {"type": "custom", "s": kernel.s, "dim": kernel.dim,
           "lambda": kernel.lam, "Lambda": kernel.Lam}
    if angular_coeffs is not None:
        cfg["angular"] = {"cos_even": list(angular_coeffs)}
    return cfg
