"""Command line interface.

    curvedfield background  --config run.cfg [--out table.csv] [--tolerance T]
    curvedfield transform   --config run.cfg [--out table.csv] [--tolerance T]
    curvedfield synthesize  --config run.cfg --out field.cfd [--seed S] [--threads N]
    curvedfield estimate    --config run.cfg [--out table.csv] [--seed S] [--threads N]
    curvedfield spin        --config run.cfg --out field.cfd [--seed S]

Configs are flat key=value files (see config module).  Exit codes: 0 success,
2 configuration or usage error, 3 invalid domain or malformed data, 4 failed
convergence or accuracy certification.  CSV outputs carry provenance comments
(library version, command, config hash, seed); binary outputs use the field
container (see fieldfile module).  --threads (or CURVEDFIELD_THREADS) only
changes scheduling: outputs are bitwise independent of it.
"""
from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import __version__
from .config import Option, apply_schema, config_hash, load_config
from .cosmology import geometry_from_params, hubble, lookback_time, make_params, comoving_distance
from .errors import (AccuracyError, ConfigError, ConvergenceError, DomainError,
                     FieldFileError, KernelDefinitenessError)
from .fieldfile import FieldFile, write_field
from .geometry import Geometry, Kind
from .quadrature import gauss_legendre_grid
from .randfield import (GaussianBump, PowerLaw, SynthesisConfig, Tabulated,
                        analytic_correlation, estimate_correlation, synthesize)
from .sft import (RadialProfile, Spectrum, bump_profile, closed_k_lattice,
                  forward_isotropic, inverse_isotropic)
from .spinfield import LENSING_SPINS, lensing_ladder, separable_kernels, synthesize_spin


def _threads(args) -> int:
    if getattr(args, "threads", None):
        n = args.threads
    else:
        n = int(os.environ.get("CURVEDFIELD_THREADS", "1"))
    if n < 1:
        raise ConfigError("thread count must be >= 1")
    return n


def _provenance(args, raw) -> list[str]:
    lines = [f"# curvedfield {__version__} {args.command}",
             f"# config sha256: {config_hash(raw)}"]
    if getattr(args, "seed", None) is not None:
        lines.append(f"# seed: {args.seed}")
    return lines


def _write_table(args, raw, columns: dict[str, np.ndarray], notes=()):
    lines = _provenance(args, raw) + [f"# {n}" for n in notes]
    lines.append(",".join(columns))
    cols = [np.atleast_1d(np.asarray(v)) for v in columns.values()]
    for row in zip(*cols):
        lines.append(",".join(f"{v:.17g}" for v in row))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _geometry(cfg, prefix="geometry") -> Geometry:
    kind = cfg[f"{prefix}.kind"]
    K = cfg[f"{prefix}.k"]
    if kind == "flat":
        return Geometry.flat()
    if kind == "open":
        return Geometry.open(K)
    if kind == "closed":
        return Geometry.closed(K)
    raise ConfigError(f"{prefix}.kind must be open, flat or closed, not {kind!r}")


_GEOM_SCHEMA = {
    "geometry.kind": Option("str"),
    "geometry.k": Option("float", 0.0),
}

_SPECTRUM_SCHEMA = {
    "spectrum.form": Option("str"),
    "spectrum.amplitude": Option("float", 1.0),
    "spectrum.index": Option("float", 0.0),
    "spectrum.k_cut_low": Option("float", 0.0),
    "spectrum.k_cut_high": Option("float", math.inf),
    "spectrum.k0": Option("float", 1.0),
    "spectrum.sigma": Option("float", 0.5),
    "spectrum.file": Option("str", ""),
}

_SYNTH_SCHEMA = {
    "synthesis.l_max": Option("int"),
    "synthesis.k_max": Option("float", 0.0),
    "synthesis.k_panels": Option("int", 48),
    "synthesis.k_order": Option("int", 12),
    "synthesis.omega_max": Option("int", -1),
    "synthesis.real": Option("bool", True),
    "synthesis.closed_weight": Option("str", "plancherel"),
}


def _spectrum(cfg):
    form = cfg["spectrum.form"]
    if form == "power_law":
        return PowerLaw(cfg["spectrum.amplitude"], cfg["spectrum.index"],
                        cfg["spectrum.k_cut_low"], cfg["spectrum.k_cut_high"])
    if form == "gaussian_bump":
        return GaussianBump(cfg["spectrum.amplitude"], cfg["spectrum.k0"],
                            cfg["spectrum.sigma"])
    if form == "tabulated":
        path = cfg["spectrum.file"]
        if not path:
            raise ConfigError("spectrum.form=tabulated needs spectrum.file")
        try:
            table = np.loadtxt(path, delimiter=",")
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read spectrum table {path}: {exc}") from None
        if table.ndim != 2 or table.shape[1] != 2:
            raise ConfigError("spectrum table must have two columns: k, P")
        return Tabulated(table[:, 0], table[:, 1])
    raise ConfigError(f"unknown spectrum.form {form!r}")


def _synth_config(cfg, geom, seed, threads, n_realizations=1) -> SynthesisConfig:
    return SynthesisConfig(
        L_max=cfg["synthesis.l_max"], seed=seed,
        k_max=cfg["synthesis.k_max"] or None,
        k_panels=cfg["synthesis.k_panels"], k_order=cfg["synthesis.k_order"],
        omega_max=None if cfg["synthesis.omega_max"] < 0 else cfg["synthesis.omega_max"],
        n_realizations=n_realizations, real=cfg["synthesis.real"],
        closed_weight=cfg["synthesis.closed_weight"], threads=threads)


def _tensor_grid(cfg):
    nchi, ntheta, nphi = cfg["grid.n_chi"], cfg["grid.n_theta"], cfg["grid.n_phi"]
    if min(nchi, ntheta, nphi) < 1:
        raise ConfigError("grid sizes must be >= 1")
    chi = np.linspace(cfg["grid.chi_min"], cfg["grid.chi_max"], nchi)
    theta = (np.arange(ntheta) + 0.5) * math.pi / ntheta
    phi = np.arange(nphi) * 2.0 * math.pi / nphi
    return chi, theta, phi


_GRID_SCHEMA = {
    "grid.n_chi": Option("int", 8),
    "grid.chi_min": Option("float", 0.0),
    "grid.chi_max": Option("float"),
    "grid.n_theta": Option("int", 8),
    "grid.n_phi": Option("int", 16),
}


# ---------------------------------------------------------------------------
# background
# ---------------------------------------------------------------------------

def cmd_background(args) -> int:
    raw = load_config(args.config)
    cfg = apply_schema(raw, {
        "cosmology.h0": Option("float"),
        "cosmology.omega_m": Option("float"),
        "cosmology.omega_l": Option("float"),
        "cosmology.omega_r": Option("float", 0.0),
        "cosmology.omega_k": Option("str", ""),
        "grid.z_max": Option("float", 10.0),
        "grid.n_z": Option("int", 65),
    })
    omega_k = None if cfg["cosmology.omega_k"] in ("", "solve") else float(cfg["cosmology.omega_k"])
    params = make_params(cfg["cosmology.h0"], cfg["cosmology.omega_m"],
                         cfg["cosmology.omega_l"], cfg["cosmology.omega_r"], omega_k)
    geom = geometry_from_params(params)
    rtol = args.tolerance or 1e-8
    z = np.linspace(0.0, cfg["grid.z_max"], cfg["grid.n_z"])
    table = {
        "z": z,
        "hubble_km_s_mpc": hubble(params, z),
        "comoving_distance_mpc": comoving_distance(params, z, rtol=rtol),
        "lookback_h0": lookback_time(params, z, rtol=rtol),
        "lookback_gyr": lookback_time(params, z, rtol=rtol, unit="Gyr"),
    }
    notes = [
        f"omega_k: {params.Omega_K:.17g} (closure residual {params.closure_residual:.3e})",
        f"geometry: {geom.kind.value} K={geom.K:.17g} Mpc^-2",
    ]
    _write_table(args, raw, table, notes)
    return 0


# ---------------------------------------------------------------------------
# transform
# ---------------------------------------------------------------------------

def cmd_transform(args) -> int:
    raw = load_config(args.config)
    cfg = apply_schema(raw, {
        **_GEOM_SCHEMA,
        "transform.mode": Option("str", "roundtrip"),
        "transform.normalization": Option("str", "consistent"),
        "profile.center": Option("float"),
        "profile.halfwidth": Option("float"),
        "profile.amplitude": Option("float", 1.0),
        "grid.chi_max": Option("float"),
        "grid.panels": Option("int", 64),
        "grid.order": Option("int", 12),
        "spectral.k_max": Option("float", 0.0),
        "spectral.omega_max": Option("int", -1),
        "spectral.panels": Option("int", 0),
        "spectral.order": Option("int", 0),
    })
    geom = _geometry(cfg)
    mode = cfg["transform.mode"]
    if mode not in ("forward", "inverse", "roundtrip"):
        raise ConfigError(f"transform.mode must be forward, inverse or roundtrip, not {mode!r}")
    tail_tol = args.tolerance or 1e-3
    order = cfg["grid.order"]
    chi, wchi = gauss_legendre_grid(0.0, cfg["grid.chi_max"], cfg["grid.panels"], order)
    f = bump_profile(chi, cfg["profile.center"], cfg["profile.halfwidth"],
                     cfg["profile.amplitude"])
    profile = RadialProfile(geom, chi, f, wchi)
    if geom.kind is Kind.CLOSED:
        if cfg["spectral.omega_max"] < 0:
            raise ConfigError("closed transform needs spectral.omega_max")
        k = closed_k_lattice(geom, cfg["spectral.omega_max"])
        spec = forward_isotropic(profile, k, tail_tol=tail_tol)
    else:
        if cfg["spectral.k_max"] <= 0:
            raise ConfigError("open/flat transform needs spectral.k_max > 0")
        k, wk = gauss_legendre_grid(0.0, cfg["spectral.k_max"],
                                    cfg["spectral.panels"] or cfg["grid.panels"],
                                    cfg["spectral.order"] or order)
        spec = forward_isotropic(profile, k, tail_tol=tail_tol)
        spec = Spectrum(geom, k, spec.values, wk)
    if mode == "forward":
        _write_table(args, raw, {"k": spec.k, "f00": spec.values})
        return 0
    back = inverse_isotropic(spec, chi, normalization=cfg["transform.normalization"],
                             tail_tol=tail_tol)
    scale = float(np.max(np.abs(f))) or 1.0
    err = float(np.max(np.abs(back.values - f))) / scale
    notes = [f"max relative roundtrip error: {err:.6e}"]
    if mode == "inverse":
        _write_table(args, raw, {"chi": chi, "f": back.values}, notes)
    else:
        _write_table(args, raw, {"chi": chi, "f_in": f, "f_back": back.values}, notes)
    return 0


# ---------------------------------------------------------------------------
# synthesize
# ---------------------------------------------------------------------------

def cmd_synthesize(args) -> int:
    raw = load_config(args.config)
    cfg = apply_schema(raw, {**_GEOM_SCHEMA, **_SPECTRUM_SCHEMA,
                             **_SYNTH_SCHEMA, **_GRID_SCHEMA})
    if not args.out:
        raise ConfigError("synthesize needs --out for the field container")
    geom = _geometry(cfg)
    P = _spectrum(cfg)
    scfg = _synth_config(cfg, geom, args.seed, _threads(args))
    chi, theta, phi = _tensor_grid(cfg)
    cc, tt, pp = np.meshgrid(chi, theta, phi, indexing="ij")
    field = synthesize(geom, P, scfg, cc.ravel(), tt.ravel(), pp.ravel())
    values = field.values[0].reshape(chi.size, theta.size, phi.size)
    digest = write_field(args.out, FieldFile(
        geom, 0, args.seed, chi, theta, phi, values, config_hash(raw)))
    print(f"wrote {args.out} sha256={digest} "
          f"rms={float(np.sqrt(np.mean(values ** 2))):.6g}")
    return 0


# ---------------------------------------------------------------------------
# estimate
# ---------------------------------------------------------------------------

def cmd_estimate(args) -> int:
    raw = load_config(args.config)
    cfg = apply_schema(raw, {
        **_GEOM_SCHEMA, **_SPECTRUM_SCHEMA, **_SYNTH_SCHEMA,
        "estimate.n_realizations": Option("int", 2000),
        "estimate.lags": Option("str"),
        "analytic.k_max": Option("float", 0.0),
        "analytic.panels": Option("int", 200),
        "analytic.order": Option("int", 12),
    })
    geom = _geometry(cfg)
    P = _spectrum(cfg)
    try:
        lags = np.array([float(tok) for tok in cfg["estimate.lags"].split(",") if tok.strip()])
    except ValueError:
        raise ConfigError(f"estimate.lags must be comma-separated floats, got "
                          f"{cfg['estimate.lags']!r}") from None
    if lags.size == 0:
        raise ConfigError("estimate.lags is empty")
    scfg = _synth_config(cfg, geom, args.seed, _threads(args),
                         n_realizations=cfg["estimate.n_realizations"])
    chi = np.concatenate([[0.0], lags])
    theta = np.full_like(chi, 0.5 * math.pi)
    phi = np.zeros_like(chi)
    field = synthesize(geom, P, scfg, chi, theta, phi)
    est = estimate_correlation(field.values[:, 0], field.values[:, 1:])
    if geom.kind is Kind.CLOSED:
        ana = analytic_correlation(geom, P, lags, omega_max=scfg.omega_max)
    else:
        ana = analytic_correlation(geom, P, lags,
                                   k_max=cfg["analytic.k_max"] or scfg.k_max,
                                   panels=cfg["analytic.panels"],
                                   order=cfg["analytic.order"])
    z = np.abs(est.mean - ana) / np.where(est.stderr > 0, est.stderr, np.inf)
    notes = [f"realizations: {est.n}", f"max |z|: {float(np.max(z)):.3f}"]
    _write_table(args, raw, {"lag": lags, "estimate": est.mean,
                             "stderr": est.stderr, "analytic": ana, "z": z}, notes)
    return 0


# ---------------------------------------------------------------------------
# spin
# ---------------------------------------------------------------------------

def cmd_spin(args) -> int:
    raw = load_config(args.config)
    cfg = apply_schema(raw, {
        "spin.s": Option("int"),
        "spin.l_max": Option("int"),
        "kernel.amplitude": Option("float", 1.0),
        "kernel.corr_length": Option("float", 1.0),
        "kernel.ell_scale": Option("float", 8.0),
        "lensing.observable": Option("str", ""),
        **_GRID_SCHEMA,
    })
    if not args.out:
        raise ConfigError("spin needs --out for the field container")
    s, L = cfg["spin.s"], cfg["spin.l_max"]
    chi, theta, phi = _tensor_grid(cfg)
    observable = cfg["lensing.observable"]
    if observable:
        if observable not in LENSING_SPINS:
            raise ConfigError(f"lensing.observable must be one of "
                              f"{sorted(LENSING_SPINS)}, not {observable!r}")
        if s != LENSING_SPINS[observable]:
            raise ConfigError(f"spin.s={s} does not match {observable} "
                              f"(s={LENSING_SPINS[observable]})")
        potential = separable_kernels(0, np.arange(0, L + 1), chi,
                                      cfg["kernel.amplitude"],
                                      cfg["kernel.corr_length"],
                                      cfg["kernel.ell_scale"])
        kernels = lensing_ladder(potential, observable)
    else:
        kernels = separable_kernels(s, np.arange(abs(s), L + 1), chi,
                                    cfg["kernel.amplitude"],
                                    cfg["kernel.corr_length"],
                                    cfg["kernel.ell_scale"])
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    field = synthesize_spin(s, kernels, tt.ravel(), pp.ravel(), args.seed)
    values = field.values[0].reshape(chi.size, theta.size, phi.size)
    geom = Geometry.flat()   # container geometry tag; spin sampling is per-shell
    digest = write_field(args.out, FieldFile(
        geom, s, args.seed, chi, theta, phi, values, config_hash(raw)))
    print(f"wrote {args.out} sha256={digest} multipoles l={kernels.ell.min()}"
          f"..{kernels.ell.max()}")
    return 0


# ---------------------------------------------------------------------------
# parser and entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvedfield",
        description="Spectral tools for fields on constant-curvature backgrounds.")
    parser.add_argument("--version", action="version",
                        version=f"curvedfield {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_, seed=False, threads=False, tolerance=False):
        p = subs.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="key=value config file")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        if seed:
            p.add_argument("--seed", type=int, default=0, help="RNG seed")
        if threads:
            p.add_argument("--threads", type=int, default=None,
                           help="worker threads (or CURVEDFIELD_THREADS); "
                                "never changes results, only scheduling")
        if tolerance:
            p.add_argument("--tolerance", type=float, default=None,
                           help="numerical tolerance override")
        p.set_defaults(func=func)
        return p

    add("background", cmd_background, "FLRW background table", tolerance=True)
    add("transform", cmd_transform, "isotropic transform of a built-in profile",
        tolerance=True)
    add("synthesize", cmd_synthesize, "draw a Gaussian field realization",
        seed=True, threads=True)
    add("estimate", cmd_estimate, "Monte Carlo check of the two-point function",
        seed=True, threads=True)
    add("spin", cmd_spin, "draw a spin-weighted field realization", seed=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except BrokenPipeError:
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, KernelDefinitenessError, FieldFileError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 3
    except (ConvergenceError, AccuracyError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
