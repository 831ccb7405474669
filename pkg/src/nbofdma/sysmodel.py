"""Uplink geometry, mobility and multipath channel sampling.

Layout: 2N+1 devices on 2N+1 sub-carriers (one device per sub-carrier, fully
loaded), base station at the cell centre.  Open-loop power control inverts
the median path loss, so every device arrives at the base station with the
same effective power and position drops out of the interference statistics.
Path delays are absorbed into the uniform path phases and never drawn.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SystemConfig",
    "CellConfig",
    "MobilityModel",
    "PropagationPath",
    "Device",
    "CellBatch",
    "subcarrier_frequency",
    "doppler_shift",
    "required_transmit_power",
    "sample_paths",
    "sample_device",
    "sample_cell_batch",
]

TWO_PI = 2.0 * math.pi


def _require(condition: bool, message: str):
    if not condition:
        raise ValueError(message)


@dataclass(frozen=True)
class SystemConfig:
    """Air-interface constants shared by every analysis entry point."""

    carrier_frequency_hz: float = 900e6
    subcarrier_spacing_hz: float = 2500.0
    symbol_period_s: float | None = None  # defaults to 1 / subcarrier_spacing_hz
    half_subcarriers: int = 24            # the system carries 2N + 1 sub-carriers
    bandwidth_hz: float = 200e3           # 0 disables the sum-rate output
    effective_power: float = 1.0          # common received power target P_T
    noise_variance: float = 0.01          # receiver noise power (20 dB SNR at P_T = 1)
    wave_speed_mps: float = 3e8

    def __post_init__(self):
        if self.symbol_period_s is None:
            _require(self.subcarrier_spacing_hz > 0.0,
                     "subcarrier_spacing_hz must be positive")
            object.__setattr__(self, "symbol_period_s", 1.0 / self.subcarrier_spacing_hz)
        _require(self.carrier_frequency_hz > 0.0, "carrier_frequency_hz must be positive")
        _require(self.subcarrier_spacing_hz > 0.0, "subcarrier_spacing_hz must be positive")
        _require(self.symbol_period_s > 0.0, "symbol_period_s must be positive")
        _require(int(self.half_subcarriers) == self.half_subcarriers
                 and self.half_subcarriers >= 0,
                 "half_subcarriers must be a non-negative integer")
        _require(self.bandwidth_hz >= 0.0, "bandwidth_hz must be non-negative")
        _require(self.effective_power > 0.0, "effective_power must be positive")
        _require(self.noise_variance >= 0.0, "noise_variance must be non-negative")
        _require(self.wave_speed_mps > 0.0, "wave_speed_mps must be positive")
        product = self.symbol_period_s * self.subcarrier_spacing_hz
        q = round(product)
        _require(q >= 1 and abs(product - q) <= 1e-9 * q,
                 "symbol_period_s * subcarrier_spacing_hz must be a positive integer "
                 f"(got {product!r}); orthogonality needs an integer number of "
                 "sub-carrier cycles per symbol")
        if self.bandwidth_hz > 0.0:
            occupied = (2 * self.half_subcarriers + 1) * self.subcarrier_spacing_hz
            _require(occupied <= self.bandwidth_hz * (1.0 + 1e-12),
                     f"bandwidth_hz={self.bandwidth_hz} cannot fit "
                     f"{2 * self.half_subcarriers + 1} sub-carriers spaced "
                     f"{self.subcarrier_spacing_hz} Hz apart")

    @property
    def spacing_symbol_product(self) -> int:
        """T_s * df as the exact small integer it is constrained to be."""
        return round(self.symbol_period_s * self.subcarrier_spacing_hz)


@dataclass(frozen=True)
class CellConfig:
    """Cell geometry and propagation constants."""

    radius_m: float = 1000.0
    path_loss_exponent: float = 3.5
    # median large-scale loss constant in P_rx = K * r^-beta * P_tx; renamed
    # from the customary single letter to avoid clashing with the wave speed
    reference_loss_median: float = 1.0
    scatterer_radius_m: float = 50.0      # local scatterer ring around each device
    paths_per_device: int = 8

    def __post_init__(self):
        _require(self.radius_m > 0.0, "radius_m must be positive")
        _require(self.path_loss_exponent >= 2.0, "path_loss_exponent must be at least 2")
        _require(self.reference_loss_median > 0.0, "reference_loss_median must be positive")
        _require(self.scatterer_radius_m > 0.0, "scatterer_radius_m must be positive")
        _require(int(self.paths_per_device) == self.paths_per_device
                 and self.paths_per_device >= 1,
                 "paths_per_device must be a positive integer")


@dataclass(frozen=True)
class MobilityModel:
    """Uniform speed on [0, V_max] with uniform heading; V_max = 0 is static."""

    max_velocity_mps: float = 100.0

    def __post_init__(self):
        _require(math.isfinite(self.max_velocity_mps) and self.max_velocity_mps >= 0.0,
                 "max_velocity_mps must be finite and non-negative")


@dataclass(frozen=True)
class PropagationPath:
    """One scatterer path: complex gain, phase, arrival angle, Doppler shift."""

    gain: complex
    phase_rad: float
    arrival_angle_rad: float
    doppler_hz: float

    def __post_init__(self):
        _require(0.0 <= self.phase_rad < TWO_PI, "phase_rad must lie in [0, 2*pi)")
        _require(0.0 <= self.arrival_angle_rad < TWO_PI,
                 "arrival_angle_rad must lie in [0, 2*pi)")


@dataclass(frozen=True)
class Device:
    """One uplink device: position, motion, sub-carrier and channel paths."""

    radius_m: float
    angle_rad: float
    velocity_mps: float
    direction_rad: float
    subcarrier_index: int
    paths: tuple[PropagationPath, ...]

    def __post_init__(self):
        _require(self.radius_m >= 0.0, "radius_m must be non-negative")
        _require(self.velocity_mps >= 0.0, "velocity_mps must be non-negative")
        _require(len(self.paths) >= 1, "a device needs at least one path")


@dataclass(frozen=True)
class CellBatch:
    """Vectorized device draws: (trials, devices) scalars, (trials, devices,
    paths) per-path arrays.  Same law and same per-field draw order as
    :func:`sample_device`, produced from a single generator."""

    radius_m: np.ndarray
    angle_rad: np.ndarray
    velocity_mps: np.ndarray
    direction_rad: np.ndarray
    arrival_angle_rad: np.ndarray
    phase_rad: np.ndarray
    gain: np.ndarray
    doppler_hz: np.ndarray


def subcarrier_frequency(index: int, cfg: SystemConfig) -> float:
    """Baseband frequency of sub-carrier ``index``, i.e. index * spacing."""
    n = cfg.half_subcarriers
    if not -n <= index <= n:
        raise ValueError(f"sub-carrier index {index} outside [-{n}, {n}]")
    return index * cfg.subcarrier_spacing_hz


def doppler_shift(velocity_mps: float, arrival_angle_rad: float, cfg: SystemConfig) -> float:
    """Frequency shift (v / c) * f_c * cos(angle) seen along one path."""
    return (velocity_mps / cfg.wave_speed_mps) * cfg.carrier_frequency_hz \
        * math.cos(arrival_angle_rad)


def required_transmit_power(device_radius_m: float, cell: CellConfig,
                            cfg: SystemConfig) -> float:
    """Transmit power that inverts the median path loss at radius r.

    With P_tx = P_T * r^beta / K the base station receives exactly
    cfg.effective_power from the device, whatever its distance.
    """
    if not 0.0 < device_radius_m <= cell.radius_m:
        raise ValueError(
            f"device_radius_m={device_radius_m} outside (0, {cell.radius_m}]")
    return cfg.effective_power * device_radius_m ** cell.path_loss_exponent \
        / cell.reference_loss_median


def sample_paths(rng, n_paths: int, velocity_mps: float,
                 cfg: SystemConfig) -> tuple[PropagationPath, ...]:
    """Draw the multipath profile of one device moving at ``velocity_mps``.

    Arrival angles and phases are i.i.d. uniform on [0, 2*pi); gains are
    i.i.d. circular complex Gaussian scaled so the total mean path power is
    one.  Draw order (angles, phases, gain normals) is fixed, which makes a
    seeded generator reproduce the same paths.
    """
    if n_paths < 1:
        raise ValueError("n_paths must be at least 1")
    arrival = rng.uniform(0.0, TWO_PI, n_paths)
    phase = rng.uniform(0.0, TWO_PI, n_paths)
    normals = rng.standard_normal((n_paths, 2))
    scale = 1.0 / math.sqrt(2.0 * n_paths)
    return tuple(
        PropagationPath(
            gain=complex(normals[m, 0] * scale, normals[m, 1] * scale),
            phase_rad=float(phase[m]),
            arrival_angle_rad=float(arrival[m]),
            doppler_hz=doppler_shift(velocity_mps, float(arrival[m]), cfg),
        )
        for m in range(n_paths)
    )


def sample_device(rng, cell: CellConfig, mob: MobilityModel, index: int,
                  cfg: SystemConfig) -> Device:
    """Draw one device on sub-carrier ``index``.

    Position is uniform over the disc (radius R * sqrt(U)), speed uniform on
    [0, V_max], heading uniform, then the multipath profile.  V_max = 0
    yields zero speed and zero Doppler on every path.
    """
    n = cfg.half_subcarriers
    if not -n <= index <= n:
        raise ValueError(f"sub-carrier index {index} outside [-{n}, {n}]")
    radius = cell.radius_m * math.sqrt(rng.random())
    angle = rng.uniform(0.0, TWO_PI)
    velocity = rng.uniform(0.0, mob.max_velocity_mps)
    direction = rng.uniform(0.0, TWO_PI)
    paths = sample_paths(rng, cell.paths_per_device, velocity, cfg)
    return Device(
        radius_m=radius,
        angle_rad=angle,
        velocity_mps=velocity,
        direction_rad=direction,
        subcarrier_index=index,
        paths=paths,
    )


def sample_cell_batch(rng, n_trials: int, n_devices: int, cell: CellConfig,
                      mob: MobilityModel, cfg: SystemConfig) -> CellBatch:
    """Array-shaped :func:`sample_device` for Monte Carlo inner loops.

    One generator fills (trials, devices) arrays field by field in the same
    order as the scalar sampler: position, speed, heading, then arrival
    angles, phases and gain normals per path.
    """
    if n_trials < 1 or n_devices < 1:
        raise ValueError("n_trials and n_devices must be at least 1")
    m = cell.paths_per_device
    flat = (n_trials, n_devices)
    per_path = (n_trials, n_devices, m)
    radius = cell.radius_m * np.sqrt(rng.random(flat))
    angle = rng.uniform(0.0, TWO_PI, flat)
    velocity = rng.uniform(0.0, mob.max_velocity_mps, flat)
    direction = rng.uniform(0.0, TWO_PI, flat)
    arrival = rng.uniform(0.0, TWO_PI, per_path)
    phase = rng.uniform(0.0, TWO_PI, per_path)
    normals = rng.standard_normal(per_path + (2,))
    gain = (normals[..., 0] + 1j * normals[..., 1]) / math.sqrt(2.0 * m)
    doppler = (velocity[..., None] / cfg.wave_speed_mps) \
        * cfg.carrier_frequency_hz * np.cos(arrival)
    return CellBatch(
        radius_m=radius,
        angle_rad=angle,
        velocity_mps=velocity,
        direction_rad=direction,
        arrival_angle_rad=arrival,
        phase_rad=phase,
        gain=gain,
        doppler_hz=doppler,
    )
