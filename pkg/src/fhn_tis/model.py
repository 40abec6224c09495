"""Parameter set, drive family, and right-hand sides of the three systems.

The package studies a planar relaxation neuron driven through a slowly varying
envelope. Three views of the dynamics share one parameter set:

* the full system, forced by two fast carriers whose beat creates the envelope,
* the averaged system, forced by the envelope f(t) in [-1, 1] directly,
* the frozen system, where the envelope is held at a constant c.

Everything here is an immutable value; all operations are pure functions.
"""
from __future__ import annotations

import dataclasses
import math
from typing import NamedTuple, Union

import numpy as np

from .errors import ConfigError, DomainError, UnsupportedDriveError


def _positive(name: str, value) -> float:
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a number, got {value!r}", key=name) from None
    if not math.isfinite(x) or x <= 0.0:
        raise ConfigError(f"{name} must be finite and > 0, got {x}", key=name)
    return x


@dataclasses.dataclass(frozen=True)
class Params:
    """Dimensionless model parameters; all five must be strictly positive.

    ``folds_everywhere`` records (without rejecting) whether A + B < sqrt(2),
    i.e. whether the cubic nullcline keeps its fold for every envelope value.
    """

    A: float
    B: float
    beta: float
    gamma: float
    epsilon: float

    def __post_init__(self):
        for name in ("A", "B", "beta", "gamma", "epsilon"):
            object.__setattr__(self, name, _positive(name, getattr(self, name)))

    @property
    def folds_everywhere(self) -> bool:
        return self.A + self.B < math.sqrt(2.0)


class State(NamedTuple):
    v: float
    w: float


@dataclasses.dataclass(frozen=True)
class AveragedCosine:
    """Smooth envelope f(t) = cos(eta * t)."""

    eta: float

    def __post_init__(self):
        object.__setattr__(self, "eta", _positive("eta", self.eta))


@dataclasses.dataclass(frozen=True)
class SignCosine:
    """Square-wave envelope f(t) = sign(cos(eta * t)), with sign(0) := +1."""

    eta: float

    def __post_init__(self):
        object.__setattr__(self, "eta", _positive("eta", self.eta))

    def switch_times(self, t0: float, t_final: float) -> np.ndarray:
        """Discontinuity instants t_k = (k + 1/2) * pi / eta inside (t0, t_final)."""
        half = math.pi / self.eta
        k0 = math.ceil(t0 / half - 0.5 + 1e-12)
        k1 = math.floor(t_final / half - 0.5 - 1e-12)
        if k1 < k0:
            return np.empty(0)
        return (np.arange(k0, k1 + 1) + 0.5) * half


@dataclasses.dataclass(frozen=True)
class FrozenConstant:
    """Envelope held at the constant value c in [-1, 1]."""

    c: float

    def __post_init__(self):
        c = float(self.c)
        if not math.isfinite(c) or abs(c) > 1.0:
            raise ConfigError(f"c must lie in [-1, 1], got {c}", key="c")
        object.__setattr__(self, "c", c)


@dataclasses.dataclass(frozen=True)
class RawInterference:
    """Two-carrier forcing A*w1*cos(w1 t) + B*w2*cos(w2 t); beat = omega2 - omega1."""

    omega1: float
    omega2: float

    def __post_init__(self):
        object.__setattr__(self, "omega1", _positive("omega1", self.omega1))
        object.__setattr__(self, "omega2", _positive("omega2", self.omega2))
        if self.omega2 <= self.omega1:
            raise ConfigError(
                f"omega2 must exceed omega1 (positive beat), got {self.omega1}, {self.omega2}",
                key="omega2",
            )

    @property
    def eta(self) -> float:
        return self.omega2 - self.omega1


@dataclasses.dataclass(frozen=True, eq=False)
class CustomSampled:
    """Uniformly sampled envelope with linear interpolation, clamped at the ends.

    An extension hook for arbitrary bounded envelopes; the analytical checkers
    in `frozen` and `singular` do not accept it.
    """

    values: np.ndarray
    dt: float

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64).copy()
        if arr.ndim != 1 or arr.size < 2:
            raise ConfigError("values must be a 1-D array with at least 2 samples",
                              key="values")
        if not np.all(np.isfinite(arr)) or np.any(np.abs(arr) > 1.0):
            raise ConfigError("sampled envelope values must be finite and within [-1, 1]",
                              key="values")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "dt", _positive("dt", self.dt))


Drive = Union[AveragedCosine, SignCosine, FrozenConstant, RawInterference, CustomSampled]

ENVELOPE_DRIVES = (AveragedCosine, SignCosine, FrozenConstant, CustomSampled)


def envelope(drive: Drive, t: float) -> float:
    """Envelope value f(t) in [-1, 1]; undefined for the raw two-carrier drive."""
    if isinstance(drive, AveragedCosine):
        return math.cos(drive.eta * t)
    if isinstance(drive, SignCosine):
        return 1.0 if math.cos(drive.eta * t) >= 0.0 else -1.0
    if isinstance(drive, FrozenConstant):
        return drive.c
    if isinstance(drive, CustomSampled):
        n = drive.values.shape[0]
        x = t / drive.dt
        if x <= 0.0:
            return float(drive.values[0])
        if x >= n - 1:
            return float(drive.values[n - 1])
        i = int(x)
        frac = x - i
        return float(drive.values[i] * (1.0 - frac) + drive.values[i + 1] * frac)
    if isinstance(drive, RawInterference):
        raise UnsupportedDriveError(
            "the raw two-carrier drive has no bounded envelope; use rhs_full")
    raise UnsupportedDriveError(f"unknown drive type {type(drive).__name__}")


def rhs_averaged(p: Params, drive: Drive, t: float, s: State) -> tuple[float, float]:
    """Vector field of the envelope-driven system at time t and state s."""
    v, w = s
    f = envelope(drive, t)
    r = 1.0 - p.A * p.A / 2.0 - p.B * p.B / 2.0 - p.A * p.B * f
    dv = r * v - v ** 3 / 3.0 - w
    dw = p.epsilon * (v - p.gamma * w + p.beta)
    return dv, dw


def rhs_full(p: Params, omega1: float, omega2: float, t: float,
             s: State) -> tuple[float, float]:
    """Vector field of the two-carrier system at time t and state s."""
    v, w = s
    forcing = p.A * omega1 * math.cos(omega1 * t) + p.B * omega2 * math.cos(omega2 * t)
    dv = v - v ** 3 / 3.0 - w + forcing
    dw = p.epsilon * (v - p.gamma * w + p.beta)
    return dv, dw


def effective_amplitudes(A: float, B: float) -> tuple[float, float]:
    """Amplitude pair of the smooth-envelope system matching a square-wave drive.

    Returns (R*cos(theta), R*sin(theta)) with R = sqrt(A**2 + B**2) and
    theta = arcsin((pi/8) * A * B / (A**2 + B**2)) / 2. By the double-angle
    identity the product of the pair is (pi/16) * A * B; see
    effective_amplitude_conventions for a side-by-side numeric comparison with
    the (pi/4) * A * B convention.
    """
    if A <= 0.0 or B <= 0.0:
        raise DomainError("effective_amplitudes requires A, B > 0")
    R = math.hypot(A, B)
    theta = 0.5 * math.asin((math.pi / 8.0) * A * B / (A * A + B * B))
    return R * math.cos(theta), R * math.sin(theta)


def effective_amplitude_conventions(A: float, B: float) -> dict:
    """Numeric comparison of the two candidate cross-term conventions.

    The rotation formula above gives a pair whose product is (pi/16)*A*B,
    while matching the first Fourier mode of a square wave would call for
    (pi/4)*A*B. Both reference values are returned so callers and tests can
    document the gap rather than silently pick one.
    """
    at, bt = effective_amplitudes(A, B)
    return {
        "A_eff": at,
        "B_eff": bt,
        "product": at * bt,
        "pi_over_16_AB": (math.pi / 16.0) * A * B,
        "pi_over_4_AB": (math.pi / 4.0) * A * B,
        "norm_preserved": abs(at * at + bt * bt - (A * A + B * B)),
    }


_PARAM_KEYS = ("A", "B", "beta", "gamma", "epsilon")

_DRIVE_SCHEMAS = {
    "averaged_cosine": ("eta",),
    "sign_cosine": ("eta",),
    "frozen_constant": ("c",),
    "raw_interference": ("omega1", "omega2"),
    "custom_sampled": ("values", "dt"),
}


def params_from_dict(d: dict) -> Params:
    """Build Params from a JSON-style mapping; unknown or missing keys are rejected."""
    for k in d:
        if k not in _PARAM_KEYS:
            raise ConfigError(f"unknown parameter key: {k!r}", key=k)
    for k in _PARAM_KEYS:
        if k not in d:
            raise ConfigError(f"missing parameter key: {k!r}", key=k)
    return Params(**{k: d[k] for k in _PARAM_KEYS})


def drive_from_dict(d: dict) -> Drive:
    """Build a Drive from a mapping with a ``kind`` tag; strict about keys."""
    if "kind" not in d:
        raise ConfigError("missing drive key: 'kind'", key="kind")
    kind = d["kind"]
    if kind not in _DRIVE_SCHEMAS:
        raise ConfigError(
            f"unknown drive kind {kind!r}; expected one of {sorted(_DRIVE_SCHEMAS)}",
            key="kind")
    fields = _DRIVE_SCHEMAS[kind]
    for k in d:
        if k != "kind" and k not in fields:
            raise ConfigError(f"unknown drive key for {kind}: {k!r}", key=k)
    for k in fields:
        if k not in d:
            raise ConfigError(f"missing drive key for {kind}: {k!r}", key=k)
    kwargs = {k: d[k] for k in fields}
    cls = {
        "averaged_cosine": AveragedCosine,
        "sign_cosine": SignCosine,
        "frozen_constant": FrozenConstant,
        "raw_interference": RawInterference,
        "custom_sampled": CustomSampled,
    }[kind]
    return cls(**kwargs)
