"""Isotropic Gaussian random fields via spectral synthesis.

A mean-zero isotropic field with spectral density P(k) >= 0 has covariance

    E[f(x1) conj(f(x2))] = C(d(x1, x2)),
    C(r) = int_0^inf Phi_k(r) k^2 P(k) dk            (open, flat)
    C(r) = sum_w K^(3/2) (w+1)^2 P(k_w) Phi_w(r)     (closed, k_w = sqrt(K)(w+1))

and the synthesis expansion over spherical modes

    f(chi, n) = alpha sum_lm Y_lm(n) sum_q R_{k_q l}(chi) k_q sqrt(P(k_q) w_q) xi_lm_q

with iid standard complex Gaussians xi, Gauss-Legendre nodes/weights (k_q, w_q)
on [0, k_max], and alpha = 2 sqrt(pi) (open), pi sqrt(2) (flat),
2 sqrt(pi) K^(3/4) (closed, where the q sum runs over the lattice with weight
(w+1) sqrt(P) in place of k sqrt(P w)).  The alpha values absorb the addition
theorem constant linking the zonal kernel to the per-model radial
normalization, so the discretized expansion reproduces the quadrature of C
exactly in expectation.

The closed-model weight (w+1) sqrt(P) matches the covariance lattice sum above
and keeps the fundamental mode w = 0; closed_weight="printed" substitutes
w sqrt(P), which silently drops w = 0.

Randomness is counter-based (Philox) with one stream per (l, m) mode keyed by
(seed, tag(l, m)), so realizations are reproducible and independent of how
modes are scheduled across threads; partial sums are reduced in a fixed l
order, making the output bitwise identical for any thread count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConvergenceError, DomainError
from .geometry import Geometry, Kind
from .quadrature import gauss_legendre_grid
from .specfun import radial, spin_harmonic, zonal_spherical

__all__ = [
    "PowerSpectrum", "PowerLaw", "GaussianBump", "Tabulated", "power_law_eval",
    "SynthesisConfig", "FieldRealization", "CorrelationEstimate",
    "synthesize", "analytic_correlation", "estimate_correlation",
]


# ---------------------------------------------------------------------------
# Power spectra
# ---------------------------------------------------------------------------

def power_law_eval(k, amplitude: float, index: float,
                   k_cut_low: float = 0.0, k_cut_high: float = math.inf):
    """A k^index restricted to [k_cut_low, k_cut_high], zero outside."""
    k = np.asarray(k, dtype=float)
    out = np.zeros_like(k)
    sel = (k >= k_cut_low) & (k <= k_cut_high) & (k > 0)
    out[sel] = amplitude * k[sel] ** index
    if index >= 0:
        out[(k == 0) & (k_cut_low <= 0)] = amplitude if index == 0 else 0.0
    return out


class PowerSpectrum:
    """Evaluable spectral density P(k) >= 0."""

    def __call__(self, k):  # pragma: no cover - interface
        raise NotImplementedError


@dataclass(frozen=True)
class PowerLaw(PowerSpectrum):
    """P(k) = amplitude * k**index on [k_cut_low, k_cut_high].

    index <= -3 with k_cut_low = 0 makes int k^2 P dk diverge at the origin,
    which no isotropic field supports, so that combination is rejected here
    rather than at synthesis time.
    """

    amplitude: float
    index: float
    k_cut_low: float = 0.0
    k_cut_high: float = math.inf

    def __post_init__(self):
        if self.amplitude < 0:
            raise DomainError("amplitude must be >= 0")
        if not 0 <= self.k_cut_low <= self.k_cut_high:
            raise DomainError("need 0 <= k_cut_low <= k_cut_high")
        if self.index <= -3 and self.k_cut_low == 0:
            raise DomainError(
                f"power law k^{self.index} is not integrable against k^2 dk "
                "at k=0; set k_cut_low > 0")

    def __call__(self, k):
        return power_law_eval(k, self.amplitude, self.index,
                              self.k_cut_low, self.k_cut_high)


@dataclass(frozen=True)
class GaussianBump(PowerSpectrum):
    """P(k) = amplitude * exp(-(k - k0)^2 / (2 sigma^2))."""

    amplitude: float
    k0: float
    sigma: float

    def __post_init__(self):
        if self.amplitude < 0 or self.sigma <= 0 or self.k0 < 0:
            raise DomainError("need amplitude >= 0, sigma > 0, k0 >= 0")

    def __call__(self, k):
        k = np.asarray(k, dtype=float)
        return self.amplitude * np.exp(-0.5 * ((k - self.k0) / self.sigma) ** 2)


@dataclass(frozen=True)
class Tabulated(PowerSpectrum):
    """Linear interpolation of samples (k_i, P_i); zero outside the table."""

    k: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.k, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if k.ndim != 1 or k.size < 2 or v.shape != k.shape:
            raise DomainError("need matching 1-d arrays with >= 2 samples")
        if np.any(np.diff(k) <= 0) or np.any(k < 0):
            raise DomainError("k samples must be >= 0 and strictly increasing")
        if np.any(v < 0) or np.any(~np.isfinite(v)):
            raise DomainError("P samples must be finite and >= 0")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "values", v)

    def __call__(self, k):
        return np.interp(np.asarray(k, dtype=float), self.k, self.values,
                         left=0.0, right=0.0)


# ---------------------------------------------------------------------------
# Synthesis configuration and outputs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SynthesisConfig:
    """Controls for the spectral synthesis.

    k_max/k_panels/k_order build the Gauss-Legendre wavenumber rule (open,
    flat); omega_max bounds the closed-model lattice.  real=True imposes the
    conjugation symmetry xi_{l,-m} = (-1)^m conj(xi_lm) so realizations are
    real valued with the same two-point function.
    """

    L_max: int
    seed: int = 0
    k_max: float | None = None
    k_panels: int = 48
    k_order: int = 12
    omega_max: int | None = None
    n_realizations: int = 1
    real: bool = True
    closed_weight: str = "plancherel"
    threads: int = 1

    def __post_init__(self):
        if self.L_max < 0 or self.n_realizations < 1 or self.threads < 1:
            raise DomainError("L_max >= 0, n_realizations >= 1, threads >= 1 required")
        if self.seed < 0 or self.seed > 2 ** 63 - 1:
            raise DomainError("seed must fit in a non-negative 63-bit integer")
        if self.k_max is not None and self.k_max <= 0:
            raise DomainError("k_max must be > 0")
        if self.k_panels < 1 or self.k_order < 2:
            raise DomainError("k_panels >= 1 and k_order >= 2 required")
        if self.omega_max is not None and self.omega_max < 0:
            raise DomainError("omega_max must be >= 0")
        if self.closed_weight not in ("plancherel", "printed"):
            raise DomainError(f"unknown closed_weight {self.closed_weight!r}")


@dataclass(frozen=True)
class FieldRealization:
    """Realizations sampled at points; values has shape (n_realizations, n_points)."""

    geometry: Geometry
    chi: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    values: np.ndarray
    seed: int
    config: SynthesisConfig


@dataclass(frozen=True)
class CorrelationEstimate:
    mean: np.ndarray
    stderr: np.ndarray
    n: int


# ---------------------------------------------------------------------------
# Mode streams
# ---------------------------------------------------------------------------

_SCALAR_TAG = 1


def mode_rng(seed: int, l: int, m: int, tag: int = _SCALAR_TAG,
             spin: int = 0) -> np.random.Generator:
    """Counter-based generator for mode (l, m); independent of call order."""
    packed = (tag & 0xFFFF) << 48 | (spin & 0xFF) << 40 | (l * (l + 1) + m)
    return np.random.Generator(np.random.Philox(key=[seed, packed]))


def _draw_xi(rng: np.random.Generator, shape: tuple[int, ...], m: int,
             real_mode: bool) -> np.ndarray:
    if real_mode and m == 0:
        return rng.standard_normal(shape).astype(complex)
    z = rng.standard_normal(shape + (2,))
    return (z[..., 0] + 1j * z[..., 1]) / math.sqrt(2.0)


# ---------------------------------------------------------------------------
# Synthesis
# ---------------------------------------------------------------------------

def _k_nodes(geom: Geometry, P: PowerSpectrum, cfg: SynthesisConfig):
    """(k nodes, per-node standard deviation weights k sqrt(P w))."""
    if geom.kind is Kind.CLOSED:
        if cfg.omega_max is None:
            raise DomainError("closed synthesis needs omega_max")
        omega = np.arange(cfg.omega_max + 1, dtype=float)
        k = geom.curvature_scale * (omega + 1.0)
        pk = np.asarray(P(k), dtype=float)
        if np.any(pk < 0):
            raise DomainError("P(k) must be >= 0")
        base = omega if cfg.closed_weight == "printed" else omega + 1.0
        return k, base * np.sqrt(pk)
    if cfg.k_max is None:
        raise DomainError("open/flat synthesis needs k_max")
    k, w = gauss_legendre_grid(0.0, cfg.k_max, cfg.k_panels, cfg.k_order)
    pk = np.asarray(P(k), dtype=float)
    if np.any(pk < 0):
        raise DomainError("P(k) must be >= 0")
    return k, k * np.sqrt(pk * w)


def _alpha(geom: Geometry) -> float:
    if geom.kind is Kind.OPEN:
        return 2.0 * math.sqrt(math.pi)
    if geom.kind is Kind.FLAT:
        return math.pi * math.sqrt(2.0)
    return 2.0 * math.sqrt(math.pi) * geom.K ** 0.75


def _radial_block(geom: Geometry, k: np.ndarray, l: int,
                  chi_u: np.ndarray) -> np.ndarray:
    """R[q, j] = R_{k_q l}(chi_u_j), certifying a sample of the nodes."""
    out = np.empty((k.size, chi_u.size))
    for q, kk in enumerate(k):
        if geom.kind is Kind.CLOSED and geom.omega_of_k(float(kk)) < l:
            out[q] = 0.0
            continue
        out[q] = radial(geom, float(kk), l, chi_u, check=(q % 16 == 0))
    return out


def _synth_l(geom, k, sd, l, chi_u, inv, theta, phi, cfg) -> np.ndarray:
    """Contribution of all m modes at one l; (n_realizations, n_points) complex."""
    R = _radial_block(geom, k, l, chi_u)          # (nq, nchi_u)
    Rp = R[:, inv]                                # (nq, npts)
    nb = cfg.n_realizations
    acc = np.zeros((nb, theta.size), dtype=complex)
    ms = range(0, l + 1) if cfg.real else range(-l, l + 1)
    for m in ms:
        xi = _draw_xi(mode_rng(cfg.seed, l, m), (nb, k.size), m, cfg.real)
        g = (xi * sd) @ Rp                        # (nb, npts)
        Y = spin_harmonic(0, l, m, theta, phi)
        acc += g * Y
        if cfg.real and m > 0:
            # xi_{l,-m} = (-1)^m conj(xi_lm) keeps f real
            Ym = spin_harmonic(0, l, -m, theta, phi)
            acc += ((-1) ** m) * np.conj(xi * sd) @ Rp * Ym
    return acc


def synthesize(geom: Geometry, P: PowerSpectrum, cfg: SynthesisConfig,
               chi, theta, phi) -> FieldRealization:
    """Draw Gaussian field realizations at points (chi, theta, phi)."""
    chi = np.atleast_1d(np.asarray(chi, dtype=float))
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    if not (chi.shape == theta.shape == phi.shape and chi.ndim == 1):
        raise DomainError("chi, theta, phi must be matching 1-d point arrays")
    geom.check_chi(chi)
    if np.any(theta < 0) or np.any(theta > math.pi):
        raise DomainError("theta must lie in [0, pi]")

    k, sd = _k_nodes(geom, P, cfg)
    chi_u, inv = np.unique(chi, return_inverse=True)
    ls = list(range(cfg.L_max + 1))

    if cfg.threads == 1:
        parts = [_synth_l(geom, k, sd, l, chi_u, inv, theta, phi, cfg) for l in ls]
    else:
        with ThreadPoolExecutor(max_workers=cfg.threads) as ex:
            futs = {l: ex.submit(_synth_l, geom, k, sd, l, chi_u, inv,
                                 theta, phi, cfg) for l in ls}
            parts = [futs[l].result() for l in ls]

    total = np.zeros((cfg.n_realizations, chi.size), dtype=complex)
    for p in parts:          # fixed l order: bitwise thread-count independent
        total += p
    total *= _alpha(geom)
    values = total.real if cfg.real else total
    return FieldRealization(geom, chi, theta, phi, values, cfg.seed, cfg)


# ---------------------------------------------------------------------------
# Correlation functions
# ---------------------------------------------------------------------------

def analytic_correlation(geom: Geometry, P: PowerSpectrum, r,
                         k_max: float | None = None, panels: int = 200,
                         order: int = 12, omega_max: int | None = None,
                         atoms=()) -> np.ndarray:
    """Covariance C(r) at geodesic lags r.

    Open/flat: Gauss-Legendre quadrature of int Phi_k(r) k^2 P(k) dk over
    [0, k_max].  Closed: exact lattice sum to omega_max.  atoms adds discrete
    spectral lines sum_j c_j Phi_{omega_j}(r); an open-model atom may sit on
    the supplementary series omega = i tau, tau in (0, 1].
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    geom.check_chi(r)
    s = geom.curvature_scale
    if geom.kind is Kind.CLOSED:
        if omega_max is None:
            raise DomainError("closed correlation needs omega_max")
        omega = np.arange(omega_max + 1, dtype=float)
        kk = s * (omega + 1.0)
        pk = np.asarray(P(kk), dtype=float)
        out = np.zeros_like(r)
        for w, amp in zip(omega, s ** 3 * (omega + 1.0) ** 2 * pk):
            if amp != 0.0:
                out += amp * zonal_spherical(geom, w, s * r)
        return out
    if k_max is None or k_max <= 0:
        raise DomainError("open/flat correlation needs k_max > 0")
    k, w = gauss_legendre_grid(0.0, k_max, panels, order)
    amp = w * k * k * np.asarray(P(k), dtype=float)
    if geom.kind is Kind.OPEN:
        rz, omegas = s * r, geom.omega_of_k(k)
    else:
        rz, omegas = r, k
    out = np.zeros_like(r)
    for om, a in zip(omegas, amp):
        if a != 0.0:
            out += a * zonal_spherical(geom, float(om), rz)
    for om, c in atoms:
        out = out + c * np.real(zonal_spherical(geom, om, rz))
    return out


def estimate_correlation(ref, lagged) -> CorrelationEstimate:
    """Monte Carlo two-point estimate E[ref conj(lagged)] with jackknife errors.

    ref has shape (N,), lagged (N, L): one reference sample and L lagged
    samples per realization.  The jackknife over realizations gives the
    standard error of the mean product.
    """
    ref = np.asarray(ref)
    lagged = np.asarray(lagged)
    if lagged.ndim == 1:
        lagged = lagged[:, None]
    if ref.ndim != 1 or lagged.shape[0] != ref.shape[0] or ref.shape[0] < 2:
        raise DomainError("need ref (N,), lagged (N, L) with N >= 2")
    n = ref.shape[0]
    prod = ref[:, None] * np.conj(lagged)
    if not np.iscomplexobj(ref) and not np.iscomplexobj(lagged):
        prod = prod.real
    mean = prod.mean(axis=0)
    # leave-one-out means; for a plain mean this reduces to stderr of the mean
    loo = (mean[None, :] * n - prod) / (n - 1)
    var = (n - 1) / n * np.sum(np.abs(loo - loo.mean(axis=0)) ** 2, axis=0)
    return CorrelationEstimate(mean, np.sqrt(var), n)
