"""Laboratory and rotating-frame parameters of the driven Duffing oscillator.

The oscillator ``H = p^2/2 + w0^2 q^2/2 + gamma q^4/4 - (F/3) q^3 cos(wF t)`` driven
near three times its eigenfrequency is described in the rotating frame by the
dimensionless quantities collected in :class:`ScaledParams`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Mapping

import yaml

from .errors import ConfigError, ModelValidityError

LAB_KEYS = ("omega0", "omegaF", "gamma", "F", "hbar", "Gamma", "nbar")
SCALED_KEYS = ("f", "lambda", "delta_omega")
# Optional companions of the scaled input style; they fix the lab frame.
SCALED_EXTRA_KEYS = ("omegaF", "hbar", "Gamma", "nbar")

DEFAULT_OMEGA_F = 3.03
DEFAULT_DELTA_OMEGA = 0.01


@dataclass(frozen=True)
class LabParams:
    omega0: float
    gamma: float
    F: float
    omegaF: float
    hbar: float = 1.0
    Gamma: float = 0.0
    nbar: float = 0.0

    def __post_init__(self):
        if self.omega0 <= 0 or self.omegaF <= 0 or self.hbar <= 0:
            raise ModelValidityError("omega0, omegaF and hbar must be positive")
        if self.Gamma < 0 or self.nbar < 0:
            raise ModelValidityError("Gamma and nbar must be non-negative")

    @property
    def delta_omega(self) -> float:
        return self.omegaF / 3 - self.omega0


@dataclass(frozen=True)
class ScaledParams:
    """Rotating-frame parameters.

    ``Xi`` is the energy scale of the rotating-wave Hamiltonian ``H_RWA = Xi * g``
    and ``C`` converts the dimensionless coordinate ``Q`` to the lab coordinate.
    ``Gamma`` and ``nbar`` ride along unchanged so that a round trip through
    :func:`from_scaled` is lossless.
    """

    f: float
    lam: float
    delta_omega: float
    C: float
    Xi: float
    K: int = 3
    Gamma: float = 0.0
    nbar: float = 0.0

    @property
    def omegaF(self) -> float:
        return 3 * self.Xi / (self.C**2 * self.delta_omega)

    @property
    def hbar(self) -> float:
        return self.lam * self.omegaF * self.C**2 / 3

    @property
    def tF(self) -> float:
        return 2 * math.pi / self.omegaF

    @property
    def frequency_scale(self) -> float:
        """``Xi / hbar``, equal to ``delta_omega / lam``."""
        return self.delta_omega / self.lam


def to_scaled(lab: LabParams) -> ScaledParams:
    dw = lab.delta_omega
    if not lab.gamma * dw > 0:
        raise ModelValidityError(
            f"gamma*delta_omega must be positive (gamma={lab.gamma}, delta_omega={dw}); "
            "choose gamma > 0 and omegaF/3 > omega0"
        )
    if lab.gamma < 0:
        raise ModelValidityError("the convention gamma > 0, delta_omega > 0 is required")
    C = math.sqrt(8 * lab.omegaF * dw / (9 * lab.gamma))
    lam = 3 * lab.hbar / (lab.omegaF * C**2)
    # the sign of F is a phase-plane rotation away from -F
    f = abs(lab.F) / math.sqrt(8 * lab.omegaF * lab.gamma * dw)
    Xi = 8 * lab.omegaF**2 * dw**2 / (27 * lab.gamma)
    return ScaledParams(f=f, lam=lam, delta_omega=dw, C=C, Xi=Xi,
                        Gamma=lab.Gamma, nbar=lab.nbar)


def from_scaled(sp: ScaledParams) -> LabParams:
    omegaF = sp.omegaF
    gamma = 8 * omegaF * sp.delta_omega / (9 * sp.C**2)
    F = sp.f * math.sqrt(8 * omegaF * gamma * sp.delta_omega)
    return LabParams(omega0=omegaF / 3 - sp.delta_omega, gamma=gamma, F=F,
                     omegaF=omegaF, hbar=sp.hbar, Gamma=sp.Gamma, nbar=sp.nbar)


def lab_from_dimensionless(f: float, lam: float, delta_omega: float = DEFAULT_DELTA_OMEGA,
                           omegaF: float = DEFAULT_OMEGA_F, hbar: float = 1.0,
                           Gamma: float = 0.0, nbar: float = 0.0) -> LabParams:
    """Lab parameters realising the given ``(f, lam)`` at detuning ``delta_omega``."""
    if lam <= 0:
        raise ModelValidityError("lambda must be positive")
    if delta_omega <= 0:
        raise ModelValidityError("delta_omega must be positive (gamma > 0 convention)")
    omega0 = omegaF / 3 - delta_omega
    if omega0 <= 0:
        raise ModelValidityError(f"delta_omega={delta_omega} leaves omega0 <= 0")
    gamma = 8 * lam * omegaF**2 * delta_omega / (27 * hbar)
    F = abs(f) * math.sqrt(8 * omegaF * gamma * delta_omega)
    return LabParams(omega0=omega0, gamma=gamma, F=F, omegaF=omegaF, hbar=hbar,
                     Gamma=Gamma, nbar=nbar)


def lab_for_detuning_ratio(f: float, lam: float, ratio: float, omega0: float = 1.0,
                           hbar: float = 1.0) -> LabParams:
    """Lab parameters with ``delta_omega / omegaF = ratio`` at fixed ``omega0``."""
    if not 0 < ratio < 1 / 3:
        raise ModelValidityError("detuning ratio must lie in (0, 1/3)")
    omegaF = omega0 / (1 / 3 - ratio)
    return lab_from_dimensionless(f, lam, ratio * omegaF, omegaF=omegaF, hbar=hbar)


def linear_drive_equivalent(Fprime: float, lab: LabParams) -> float:
    """Cubic-drive amplitude equivalent to a linear drive ``-q F' cos(wF t)``."""
    return 3 * lab.gamma * Fprime / (8 * lab.omega0**2)


def load_params(source: Mapping[str, Any] | str | Path) -> LabParams:
    """Build :class:`LabParams` from a mapping or a YAML/JSON file.

    Two mutually exclusive input styles are accepted: lab keys
    (``omega0, omegaF, gamma, F`` and optionally ``hbar, Gamma, nbar``) or
    scaled keys (``f, lambda, delta_omega`` and optionally ``omegaF, hbar,
    Gamma, nbar``).
    """
    if isinstance(source, (str, Path)):
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {source}: {exc}") from exc
        try:
            data = yaml.safe_load(text) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"malformed config {source}: {exc}") from exc
    else:
        data = dict(source)
    if not isinstance(data, dict):
        raise ConfigError("config must be a key-value mapping")
    return params_from_mapping(data)


def params_from_mapping(data: Mapping[str, Any]) -> LabParams:
    has_lab = any(k in data for k in ("omega0", "gamma", "F"))
    has_scaled = any(k in data for k in SCALED_KEYS)
    if has_lab and has_scaled:
        raise ConfigError("lab keys (omega0, gamma, F) and scaled keys "
                          "(f, lambda, delta_omega) are mutually exclusive")
    allowed = set(LAB_KEYS) if has_lab else set(SCALED_KEYS) | set(SCALED_EXTRA_KEYS)
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown parameter keys: {sorted(unknown)}")
    try:
        values = {k: float(v) for k, v in data.items()}
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"non-numeric parameter value: {exc}") from exc
    if has_lab:
        missing = [k for k in ("omega0", "omegaF", "gamma", "F") if k not in values]
        if missing:
            raise ConfigError(f"missing lab keys: {missing}")
        return LabParams(**values)
    if "f" not in values or "lambda" not in values:
        raise ConfigError("scaled input needs at least f and lambda")
    return lab_from_dimensionless(
        values["f"], values["lambda"],
        values.get("delta_omega", DEFAULT_DELTA_OMEGA),
        omegaF=values.get("omegaF", DEFAULT_OMEGA_F),
        hbar=values.get("hbar", 1.0),
        Gamma=values.get("Gamma", 0.0),
        nbar=values.get("nbar", 0.0),
    )


def as_dict(obj) -> dict[str, float]:
    return {fl.name: getattr(obj, fl.name) for fl in fields(obj)}
