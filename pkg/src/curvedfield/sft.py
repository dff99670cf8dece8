"""Isotropic spherical Fourier transform on the three constant-curvature models.

The monopole transform pairs a radial profile f(chi) with a spectral density
f00(k) through the zonal kernels Phi_k (zonal_spherical, Phi_k(0) = 1) and the
shell measure S(chi) dchi = 4 pi f_K(chi)^2 dchi:

    forward:  f00(k)   = A int f(chi) Phi_k(chi) S(chi) dchi
    inverse:  f(chi)   = B int f00(k) Phi_k(chi) k^2 dk        (open, flat)
              f(chi)   = B sum_w (w+1)^2 f00(w) Phi_w(chi)     (closed)

with forward prefactors A = 1/(2 sqrt(pi)) (open, closed) and 1/(pi sqrt(2))
(flat).  The kernels obey

    int Phi_k Phi_k' f_K^2 dchi = pi/(2 k^2) delta(k - k')          (open, flat)
    int Phi_w Phi_w' S dchi     = 2 pi^2 / (K^(3/2) (w+1)^2) d_ww'  (closed)

so inverse(forward(f)) = f requires A B = 1/(2 pi^2), resp. K^(3/2)/(2 pi^2).
normalization="consistent" (default) uses the matching B: pi^(-3/2) open,
1/(pi sqrt(2)) flat, (K/pi)^(3/2) closed.  normalization="printed" keeps the
symmetric prefactor B = A (curved models), which overcounts the roundtrip by
pi/2; it is exposed for comparison only.

Closed-model wavenumbers live on the lattice k = sqrt(K) (w+1), w = 0, 1, ...
Quadrature weights may ride along on both container types; otherwise the
trapezoid rule over the stored nodes is used.  Non-compact integrals carry a
tail monitor: if the trailing nodes contribute more than tail_tol of the
total absolute mass, the grid is declared unconverged.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DomainError
from .geometry import Geometry, Kind, surface_area
from .quadrature import tail_fraction
from .specfun import zonal_spherical

__all__ = [
    "RadialProfile", "Spectrum", "surface_area", "forward_isotropic",
    "inverse_isotropic", "closed_k_lattice", "zonal_kernel", "bump_profile",
    "profile_norm2", "spectrum_norm2", "parseval_constant",
]


def _as_grid(name: str, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise DomainError(f"{name} must be a non-empty 1-d array")
    if np.any(~np.isfinite(x)):
        raise DomainError(f"{name} must be finite")
    if np.any(np.diff(x) <= 0):
        raise DomainError(f"{name} must be strictly increasing")
    return x


@dataclass(frozen=True)
class RadialProfile:
    """Sampled radial profile; weights are quadrature weights for the chi grid."""

    geometry: Geometry
    chi: np.ndarray
    values: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self):
        chi = _as_grid("chi", self.chi)
        self.geometry.check_chi(chi)
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != chi.shape:
            raise DomainError("values must match the chi grid")
        object.__setattr__(self, "chi", chi)
        object.__setattr__(self, "values", vals)
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if w.shape != chi.shape:
                raise DomainError("weights must match the chi grid")
            object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class Spectrum:
    """Monopole spectral amplitudes on a wavenumber grid.

    For the closed model k must sit on the lattice sqrt(K) (w+1) and the
    weights field is ignored (the inversion is a discrete sum).
    """

    geometry: Geometry
    k: np.ndarray
    values: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self):
        k = _as_grid("k", self.k)
        if np.any(k < 0):
            raise DomainError("k must be >= 0")
        for kk in k:
            self.geometry.omega_of_k(float(kk))  # lattice check (closed)
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != k.shape:
            raise DomainError("values must match the k grid")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "values", vals)
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if w.shape != k.shape:
                raise DomainError("weights must match the k grid")
            object.__setattr__(self, "weights", w)


def closed_k_lattice(geom: Geometry, omega_max: int) -> np.ndarray:
    """Wavenumbers sqrt(K) (w+1) for w = 0..omega_max."""
    if geom.kind is not Kind.CLOSED:
        raise DomainError("k lattice only applies to the closed model")
    if omega_max < 0:
        raise DomainError("omega_max must be >= 0")
    return geom.curvature_scale * (np.arange(omega_max + 1) + 1.0)


def zonal_kernel(geom: Geometry, k: float, chi) -> np.ndarray:
    """Phi_k(chi) on physical arguments (k in 1/Mpc, chi in Mpc)."""
    if geom.kind is Kind.FLAT:
        return zonal_spherical(geom, k, chi)
    s = geom.curvature_scale
    return zonal_spherical(geom, geom.omega_of_k(k), s * np.asarray(chi, dtype=float))


_FORWARD_PREF = {
    Kind.OPEN: 1.0 / (2.0 * math.sqrt(math.pi)),
    Kind.FLAT: 1.0 / (math.pi * math.sqrt(2.0)),
    Kind.CLOSED: 1.0 / (2.0 * math.sqrt(math.pi)),
}


def _inverse_pref(geom: Geometry, normalization: str) -> float:
    if normalization not in ("consistent", "printed"):
        raise DomainError(f"unknown normalization {normalization!r}")
    if geom.kind is Kind.OPEN:
        return _FORWARD_PREF[Kind.OPEN] if normalization == "printed" else math.pi ** -1.5
    if geom.kind is Kind.FLAT:
        return 1.0 / (math.pi * math.sqrt(2.0))
    base = (geom.K / math.pi) ** 1.5
    return (math.pi / 2.0) * base if normalization == "printed" else base


def _weights_or_trapezoid(x: np.ndarray, weights: np.ndarray | None) -> np.ndarray:
    if weights is not None:
        return weights
    w = np.empty_like(x)
    w[1:-1] = 0.5 * (x[2:] - x[:-2])
    w[0] = 0.5 * (x[1] - x[0]) if x.size > 1 else 0.0
    w[-1] = 0.5 * (x[-1] - x[-2]) if x.size > 1 else 0.0
    return w


def _check_tail(contrib: np.ndarray, tol: float | None, what: str):
    if tol is None or contrib.size < 8:
        return
    frac = tail_fraction(contrib, max(4, contrib.size // 8))
    if frac > tol:
        raise ConvergenceError(
            f"{what} tail carries {frac:.2e} of the integrand mass "
            f"(tolerance {tol:.0e}); extend or refine the grid")


def forward_isotropic(profile: RadialProfile, k, tail_tol: float | None = 1e-3) -> Spectrum:
    """Transform a radial profile to monopole spectral amplitudes on grid k."""
    geom = profile.geometry
    k = _as_grid("k", np.atleast_1d(np.asarray(k, dtype=float)))
    w = _weights_or_trapezoid(profile.chi, profile.weights)
    base = w * profile.values * surface_area(geom, profile.chi)
    pref = _FORWARD_PREF[geom.kind]
    out = np.empty_like(k)
    worst: tuple[float, np.ndarray] | None = None
    for i, kk in enumerate(k):
        contrib = base * zonal_kernel(geom, float(kk), profile.chi)
        out[i] = pref * float(np.sum(contrib))
        if geom.kind is not Kind.CLOSED:
            tot = float(np.sum(np.abs(contrib)))
            if worst is None or tot > worst[0]:
                worst = (tot, contrib)
    if geom.kind is not Kind.CLOSED and worst is not None:
        _check_tail(worst[1], tail_tol, "forward transform chi")
    return Spectrum(geom, k, out)


def inverse_isotropic(spec: Spectrum, chi, normalization: str = "consistent",
                      tail_tol: float | None = 1e-3) -> RadialProfile:
    """Reconstruct the radial profile on grid chi from spectral amplitudes."""
    geom = spec.geometry
    chi = _as_grid("chi", np.atleast_1d(np.asarray(chi, dtype=float)))
    pref = _inverse_pref(geom, normalization)
    vals = np.zeros_like(chi)
    if geom.kind is Kind.CLOSED:
        for kk, f00 in zip(spec.k, spec.values):
            wplus1 = geom.omega_of_k(float(kk)) + 1.0
            vals += wplus1 * wplus1 * f00 * zonal_kernel(geom, float(kk), chi)
        return RadialProfile(geom, chi, pref * vals)
    w = _weights_or_trapezoid(spec.k, spec.weights)
    amp = w * spec.k ** 2 * spec.values
    for a, kk in zip(amp, spec.k):
        vals += a * zonal_kernel(geom, float(kk), chi)
    _check_tail(np.abs(amp), tail_tol, "inverse transform k")
    return RadialProfile(geom, chi, pref * vals)


def bump_profile(chi, center: float, halfwidth: float, amplitude: float = 1.0) -> np.ndarray:
    """Smooth compactly supported test profile A exp(-1/(1-t^2)), t=(chi-center)/halfwidth."""
    if halfwidth <= 0:
        raise DomainError("halfwidth must be > 0")
    chi = np.asarray(chi, dtype=float)
    t = (chi - center) / halfwidth
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    out[inside] = amplitude * np.exp(-1.0 / (1.0 - t[inside] ** 2))
    return out


def profile_norm2(profile: RadialProfile) -> float:
    """||f||^2 = int |f|^2 S(chi) dchi on the stored grid."""
    w = _weights_or_trapezoid(profile.chi, profile.weights)
    return float(np.sum(w * profile.values ** 2
                        * surface_area(profile.geometry, profile.chi)))


def spectrum_norm2(spec: Spectrum) -> float:
    """int |f00|^2 k^2 dk (open, flat) or sum (w+1)^2 |f00|^2 (closed)."""
    if spec.geometry.kind is Kind.CLOSED:
        wp1 = np.array([spec.geometry.omega_of_k(float(kk)) + 1.0 for kk in spec.k])
        return float(np.sum(wp1 ** 2 * spec.values ** 2))
    w = _weights_or_trapezoid(spec.k, spec.weights)
    return float(np.sum(w * spec.k ** 2 * spec.values ** 2))


def parseval_constant(geom: Geometry) -> float:
    """c in ||f00||^2 = c ||f||^2 for the consistent normalization."""
    if geom.kind is Kind.OPEN:
        return math.pi / 2.0
    if geom.kind is Kind.FLAT:
        return 1.0
    return math.pi / (2.0 * geom.K ** 1.5)
