"""``tripler`` command line: one subcommand per computation mode.

A YAML config supplies defaults and flags override it. Example::

    mode: scan
    params: {f: 1.0, lambda: 0.3, delta_omega: 0.01}
    f_min: 0.0
    f_max: 0.35
    f_points: 200
    out: runs/scan

Exit codes: 0 success, 1 config error, 2 non-convergence, 3 model validity.
Everything is validated before the output directory is touched.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from . import dissipation as dis
from . import io
from . import observables as obs
from .errors import ConfigError, TriplerError
from .floquet import monodromy_vs_rwa
from .params import LabParams, as_dict, params_from_mapping, to_scaled
from .rwa import (default_nmax, find_crossings, fold_quasienergy, intrawell_states,
                  lowest_triplet, scan_f, symmetry_blocks)
from .wkb import crossing_locations, triplet_harmonic, tunnel_quantities
from ._parallel import parallel_map

log = logging.getLogger("tripler")

MODES = ("convert", "spectrum", "scan", "wkb", "compare", "monodromy", "dissipate", "observe")

TARGETS = {
    "scan.csv": "RWA levels of the three symmetry sectors versus drive amplitude "
                "(level ordering at zero drive, multiplet formation)",
    "crossings.csv": "crossings of the lowest-multiplet levels versus drive amplitude",
    "wkb.csv": "tunneling action, phase and prefactor versus drive amplitude",
    "compare.csv": "numerical versus semiclassical tunnel splittings of the lowest multiplet",
    "compare_envelope.csv": "amplitude and phase of the tunnel splitting, numerics versus "
                            "semiclassics",
    "monodromy.csv": "exact Floquet quasienergies of the lowest multiplet against the RWA",
    "dissipation.csv": "well populations and interwell coherence under weak damping",
    "observe_q.csv": "period-3 oscillations of the coordinate expectation value",
    "observe_spectrum.csv": "Fourier spectrum of the coordinate near a third of the drive "
                            "frequency",
    "spectrum.csv": "RWA levels of each symmetry sector at one drive amplitude",
    "convert.csv": "lab and scaled parameter sets",
}


@dataclass
class RunConfig:
    mode: str
    params: LabParams | None = None
    raw_params: dict = field(default_factory=dict)
    f_min: float = 0.0
    f_max: float = 0.35
    f_points: int = 200
    lam: float | None = None
    n_max: int | None = None
    steps: int = 1000
    gamma_rate: float | None = None
    nbar: float | None = None
    out: str = "out"
    t_final: float | None = None
    dt: float | None = None
    samples: int = 200
    levels: int = 5
    detuning_ratio: float | None = None
    periods: int = 30
    samples_per_period: int = 40
    stride_periods: int | None = None
    tunneling: bool = True
    state: str = "psi0"
    svg: bool = False

    def validate(self) -> "RunConfig":
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.f_points < 1:
            raise ConfigError("f_points must be positive")
        if self.f_points > 1 and not self.f_max > self.f_min:
            raise ConfigError("f_max must exceed f_min")
        if self.f_min < 0:
            raise ConfigError("f_min must be non-negative")
        if self.lam is not None and self.lam <= 0:
            raise ConfigError("lambda must be positive")
        if self.n_max is not None and self.n_max < 9:
            raise ConfigError("n_max must be at least 9")
        if self.steps < 1 or self.samples < 2 or self.periods < 1:
            raise ConfigError("steps, samples and periods must be positive")
        for name in ("gamma_rate", "nbar", "t_final", "dt"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ConfigError(f"{name} must be non-negative")
        if self.state not in ("psi0", "phi01") and not self.state.startswith("phi"):
            raise ConfigError(f"unknown state {self.state!r}")
        if self.mode in ("convert", "monodromy", "dissipate", "observe", "spectrum") \
                and self.params is None:
            raise ConfigError(f"mode {self.mode} needs a params block")
        if self.mode in ("scan", "wkb", "compare") and self.lambda_value() is None:
            raise ConfigError(f"mode {self.mode} needs lambda (flag or params)")
        if self.mode in ("wkb", "compare") and self.f_min <= 0:
            raise ConfigError("semiclassical modes need f_min > 0")
        return self

    def lambda_value(self) -> float | None:
        if self.lam is not None:
            return self.lam
        if self.params is not None:
            return to_scaled(self.params).lam
        return None

    def f_grid(self) -> np.ndarray:
        return np.linspace(self.f_min, self.f_max, self.f_points)

    def ratio(self) -> float:
        if self.detuning_ratio is not None:
            return self.detuning_ratio
        if self.params is not None:
            return self.params.delta_omega / self.params.omegaF
        return 1 / 303

    def echo(self) -> dict:
        out = {"mode": self.mode}
        out.update({f"params.{k}": v for k, v in self.raw_params.items()})
        for fl in fields(self):
            if fl.name in ("mode", "params", "raw_params", "out"):
                continue
            out[fl.name] = getattr(self, fl.name)
        return out


_CONFIG_KEYS = {fl.name for fl in fields(RunConfig)} - {"raw_params"} | {"lambda"}


def config_from_mapping(data: dict[str, Any]) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    data = dict(data)
    raw = data.pop("params", None) or {}
    if not isinstance(raw, dict):
        raise ConfigError("params must be a mapping")
    if "lambda" in data:
        data["lam"] = data.pop("lambda")
    params = params_from_mapping(raw) if raw else None
    cfg = RunConfig(mode=str(data.pop("mode", "")), params=params, raw_params=dict(raw))
    for k, v in data.items():
        setattr(cfg, k, _coerce(k, v))
    return cfg


_INT_KEYS = {"f_points", "n_max", "steps", "samples", "levels", "periods",
             "samples_per_period", "stride_periods"}
_BOOL_KEYS = {"tunneling", "svg"}
_STR_KEYS = {"out", "state"}


def _coerce(key: str, value):
    if value is None or key in _STR_KEYS:
        return value if value is None else str(value)
    try:
        if key in _BOOL_KEYS:
            if not isinstance(value, bool):
                raise TypeError("expected true or false")
            return value
        if key in _INT_KEYS:
            if isinstance(value, bool) or float(value) != int(value):
                raise TypeError("expected an integer")
            return int(value)
        if isinstance(value, bool):
            raise TypeError("expected a number")
        return float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key}: {value!r} ({exc})") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tripler",
                                description="Period-tripled Floquet states of a driven "
                                            "quantum Duffing oscillator")
    sub = p.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        s = sub.add_parser(mode)
        s.add_argument("--config", type=Path)
        s.add_argument("--out")
        s.add_argument("--f-min", type=float, dest="f_min")
        s.add_argument("--f-max", type=float, dest="f_max")
        s.add_argument("--f-points", type=int, dest="f_points")
        s.add_argument("--lambda", type=float, dest="lam")
        s.add_argument("--nmax", type=int, dest="n_max")
        s.add_argument("--steps", type=int)
        s.add_argument("--gamma-rate", type=float, dest="gamma_rate")
        s.add_argument("--nbar", type=float)
        s.add_argument("--svg", action="store_true", default=None)
        s.add_argument("--no-tunneling", action="store_false", dest="tunneling", default=None)
        s.add_argument("-v", "--verbose", action="store_true")
    return p


def resolve_config(args: argparse.Namespace) -> RunConfig:
    data: dict[str, Any] = {}
    if args.config is not None:
        try:
            loaded = yaml.safe_load(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        data = loaded or {}
        if not isinstance(data, dict):
            raise ConfigError("config must be a mapping")
        if data.get("mode", args.mode) != args.mode:
            raise ConfigError(f"config mode {data['mode']!r} differs from subcommand {args.mode!r}")
    data["mode"] = args.mode
    cfg = config_from_mapping(data)
    overrides = {k: getattr(args, k) for k in
                 ("out", "f_min", "f_max", "f_points", "lam", "n_max", "steps", "gamma_rate",
                  "nbar", "svg", "tunneling") if getattr(args, k) is not None}
    return replace(cfg, **overrides).validate()


# ---------------------------------------------------------------- modes

def _scaled(cfg: RunConfig):
    sp = to_scaled(cfg.params)
    if cfg.lam is not None and abs(cfg.lam - sp.lam) > 1e-12 * sp.lam:
        raise ConfigError("--lambda conflicts with the params block")
    return sp


def run_convert(cfg):
    sp = to_scaled(cfg.params)
    lab = as_dict(cfg.params)
    cols = ["omega0", "omegaF", "gamma", "F", "hbar", "Gamma", "nbar",
            "f", "lambda", "delta_omega", "C", "Xi"]
    row = [lab["omega0"], lab["omegaF"], lab["gamma"], lab["F"], lab["hbar"], lab["Gamma"],
           lab["nbar"], sp.f, sp.lam, sp.delta_omega, sp.C, sp.Xi]
    return {"convert.csv": (cols, [row])}


def run_spectrum(cfg):
    sp = _scaled(cfg)
    n_max = cfg.n_max or default_nmax(sp.f, sp.lam)
    ratio = cfg.ratio()
    rows = []
    for b in symmetry_blocks(sp.f, sp.lam, n_max):
        for j in range(min(cfg.levels, len(b.eigenvalues))):
            g = float(b.eigenvalues[j])
            rows.append([sp.f, sp.lam, b.k, j, g, fold_quasienergy(ratio / sp.lam * g, b.k)])
    return {"spectrum.csv": (["f", "lambda", "k", "level", "g", "eps_over_hbar_omegaF"], rows)}


def run_scan(cfg):
    lam = cfg.lambda_value()
    grid = cfg.f_grid()
    n_max = cfg.n_max or default_nmax(float(grid.max()), lam)
    records = scan_f(grid, lam, n_max, cfg.ratio())
    rows = [[r.f, lam, k, r.g_k[k], r.quasienergies[k]] for r in records for k in range(3)]
    found = find_crossings(records, n_max)
    lo = max(float(grid.min()), 0.05)
    if lo < grid.max():
        found += crossing_locations(lo, float(grid.max()), lam)
    cross = [[c.f_cross, f"{c.k_pair[0]}-{c.k_pair[1]}", c.method]
             for c in sorted(found, key=lambda c: (c.f_cross, c.method))]
    out = {"scan.csv": (["f", "lambda", "k", "g_k", "eps_over_hbar_omegaF"], rows),
           "crossings.csv": (["f_cross", "k_pair", "method"], cross)}
    if cfg.svg:
        out["scan.svg"] = {f"k={k}": (grid, [r.g_k[k] for r in records]) for k in range(3)}
    return out


def run_wkb(cfg):
    lam = cfg.lambda_value()
    results = parallel_map(lambda f: tunnel_quantities(float(f), lam), cfg.f_grid())
    rows = [[w.f, lam, w.S_tun, w.Phi_tun, w.C_tun, w.theta1, *w.splittings] for w in results]
    cols = ["f", "lambda", "S_tun", "Phi_tun", "C_tun", "theta1",
            "split_k0", "split_k1", "split_k2"]
    return {"wkb.csv": (cols, rows)}


def _compare_rows(f: float, lam: float, n_max: int | None):
    g = lowest_triplet(f, lam, n_max).energies
    w = tunnel_quantities(f, lam)
    d = g - g.mean()
    log_num = math.log(np.max(np.abs(d)))
    rel = log_num - w.log_envelope
    rows = [[f, lam, k, w.splitting(k), float(d[k]), rel] for k in range(3)]
    z = triplet_harmonic(g)
    env = [f, lam, log_num, w.log_envelope, math.atan2(z.imag, z.real) % math.pi,
           w.phase_mod_pi]
    return rows, env


def run_compare(cfg):
    lam = cfg.lambda_value()
    grid = cfg.f_grid()
    n_max = cfg.n_max or default_nmax(float(grid.max()), lam)
    res = parallel_map(lambda f: _compare_rows(float(f), lam, n_max), grid)
    rows = [r for rs, _ in res for r in rs]
    env = [e for _, e in res]
    out = {"compare.csv": (["f", "lambda", "k", "delta_g_wkb", "delta_g_num", "rel_err_logamp"],
                           rows),
           "compare_envelope.csv": (["f", "lambda", "logamp_num", "logamp_wkb",
                                     "phase_num_mod_pi", "phase_wkb_mod_pi"], env)}
    if cfg.svg:
        out["compare.svg"] = {"numeric": (grid, [e[2] for e in env]),
                              "wkb": (grid, [e[3] for e in env])}
    return out


def run_monodromy(cfg):
    lab = cfg.params
    sp = _scaled(cfg)
    n_max = cfg.n_max or 120
    trip = lowest_triplet(sp.f, sp.lam, default_nmax(sp.f, sp.lam))
    mono, cmp = monodromy_vs_rwa(lab, n_max, cfg.steps, trip.energies, trip.vectors)
    if cmp.ambiguous:
        log.warning("ambiguous matching between Floquet and RWA states")
    cols = ["omega0", "omegaF", "gamma", "F", "n_max", "steps",
            "eps_k0", "eps_k1", "eps_k2", "spacing_err"]
    row = [lab.omega0, lab.omegaF, lab.gamma, lab.F, n_max, mono.steps,
           *cmp.quasienergies, cmp.spacing_err]
    return {"monodromy.csv": (cols, [row])}


def run_dissipate(cfg):
    sp = _scaled(cfg)
    Gamma = cfg.gamma_rate if cfg.gamma_rate is not None else sp.Gamma
    nbar = cfg.nbar if cfg.nbar is not None else sp.nbar
    n_max = cfg.n_max or 60
    psis = dis.well_states(sp.f, sp.lam, n_max)
    H = dis.rwa_hamiltonian(sp.f, sp.lam, n_max, sp.Xi)
    T = cfg.t_final if cfg.t_final is not None else (10 / Gamma if Gamma > 0 else 100 / sp.delta_omega)
    if cfg.dt is not None:
        dt = cfg.dt
    else:
        rate = np.max(np.abs(np.linalg.eigvalsh(H))) / sp.hbar + 4 * Gamma * (2 * nbar + 1) * n_max
        dt = 0.5 / rate
    steps = max(1, int(math.ceil(T / dt)))
    dt = T / steps
    every = max(1, steps // cfg.samples)

    def observe(r):
        p = [np.vdot(v, r @ v).real for v in psis]
        coh = abs(np.vdot(psis[0], r @ psis[1]))
        return [*p, coh, float(np.vdot(r, r).real), abs(np.trace(r).real - 1)]

    traj = dis.evolve(dis.DensityMatrix.pure(psis[0]), H, Gamma, nbar, T, dt, sp.hbar,
                      record_every=every, observe=observe, keep_states=False)
    rows = [[t, *o] for t, o in zip(traj.times, traj.observations)]
    cols = ["t", "p_well0", "p_well1", "p_well2", "coh01_abs", "purity", "trace_err"]
    out = {"dissipation.csv": (cols, rows)}
    if cfg.svg:
        out["dissipation.svg"] = {f"p{m}": (traj.times, [o[m] for o in traj.observations])
                                  for m in range(3)}
    return out


def _initial_state(cfg, sp, n_max):
    trip = lowest_triplet(sp.f, sp.lam, n_max)
    if cfg.state == "psi0":
        return intrawell_states(trip.vectors, sp.f, sp.lam)[0].amplitudes
    if cfg.state == "phi01":
        v = trip.vectors[0] + trip.vectors[1]
        return v / np.linalg.norm(v)
    try:
        k = int(cfg.state[3:])
    except ValueError as exc:
        raise ConfigError(f"unknown state {cfg.state!r}") from exc
    if k not in (0, 1, 2):
        raise ConfigError(f"unknown state {cfg.state!r}")
    return trip.vectors[k]


def run_observe(cfg):
    sp = _scaled(cfg)
    n_max = cfg.n_max or default_nmax(sp.f, sp.lam)
    psi = _initial_state(cfg, sp, n_max)
    if cfg.stride_periods:
        n = cfg.periods * cfg.samples_per_period
        series = obs.expect_q_stroboscopic(psi, sp, n_max, n, cfg.stride_periods,
                                           tunneling=cfg.tunneling)
    else:
        n = cfg.periods * cfg.samples_per_period
        times = np.arange(n + 1) * (sp.tF / cfg.samples_per_period)
        series = obs.expect_q(psi, sp, times, n_max, tunneling=cfg.tunneling)
    peaks = obs.spectrum(series)
    out = {"observe_q.csv": (["t", "expect_q"], [[t, v] for t, v in zip(series.times, series.values)]),
           "observe_spectrum.csv": (["freq", "weight"],
                                    [[a, b] for a, b in zip(peaks.frequencies, peaks.weights)])}
    if cfg.svg:
        out["observe_q.svg"] = {"<q>": (series.times, series.values)}
    return out


RUNNERS = {"convert": run_convert, "spectrum": run_spectrum, "scan": run_scan, "wkb": run_wkb,
           "compare": run_compare, "monodromy": run_monodromy, "dissipate": run_dissipate,
           "observe": run_observe}


def run(cfg: RunConfig) -> list[Path]:
    """Compute first, then write; a failure leaves no partial artifacts."""
    artifacts = RUNNERS[cfg.mode](cfg)
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    echo = cfg.echo()
    written = []
    for name, payload in artifacts.items():
        if name.endswith(".svg"):
            written.append(io.write_svg(out_dir / name, payload))
            continue
        cols, rows = payload
        written.append(io.write_csv(out_dir / name, cols, rows, echo))
        io.append_manifest(out_dir, name, TARGETS[name])
    return written


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(args)
        for path in run(cfg):
            log.info("wrote %s", path)
    except TriplerError as exc:
        print(f"tripler: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
