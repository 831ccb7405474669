"""Deterministic interference and capacity analytics.

The central dimensionless parameter is

    b = pi * V_max * f_c * T_s / c

the largest Doppler phase (times pi) a path can accumulate across one symbol.
At the critical spacing T_s * df = 1 this is b = pi * V_max * f_c / (c * df),
which is how :class:`NormalizedDoppler` reports it.

Two independent evaluation routes are kept on purpose: :func:`leakage`
integrates the sinc^2 spreading kernel over the speed and direction laws
literally (a nested double quadrature), while :func:`effective_useful_power`
uses the sine-integral reduction of that same double integral.  Their
agreement is a built-in regression check on the quadrature machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import QuadratureError, QuadratureSpec, integrate, sinc, sine_integral
from .sysmodel import SystemConfig

__all__ = [
    "NormalizedDoppler",
    "IciBounds",
    "PowerBudget",
    "leakage",
    "leakage_sum",
    "finite_n_ici",
    "effective_useful_power",
    "total_ici_power",
    "power_budget",
    "ici_bounds",
    "ici_approx",
    "approx_validity_threshold",
    "approx_is_valid",
    "capacity_upper",
    "capacity_upper_approx",
    "sum_rate_upper",
]

LOG2_E = math.log2(math.e)

# Internal quadrature policies.  These are tighter than the public defaults
# because the bound checks downstream (sandwich inclusion at small b, power
# conservation at 1e-12) need more headroom than the documented 1e-9.
_USEFUL_SPEC = QuadratureSpec(relative_tolerance=1e-12, absolute_tolerance=1e-13)
_OUTER_SPEC = QuadratureSpec(relative_tolerance=1e-10, absolute_tolerance=1e-13)
_INNER_SPEC = QuadratureSpec(relative_tolerance=1e-12, absolute_tolerance=1e-14)


@dataclass(frozen=True)
class NormalizedDoppler:
    """Dimensionless mobility severity b = pi * V_max * f_c / (c * df)."""

    b: float

    def __post_init__(self):
        if not (math.isfinite(self.b) and self.b >= 0.0):
            raise ValueError("b must be finite and non-negative")

    @classmethod
    def from_configs(cls, max_velocity_mps: float, cfg: SystemConfig) -> "NormalizedDoppler":
        b = math.pi * max_velocity_mps * cfg.carrier_frequency_hz \
            / (cfg.wave_speed_mps * cfg.subcarrier_spacing_hz)
        return cls(b=b)


@dataclass(frozen=True)
class IciBounds:
    """Closed-form sandwich around the exact interference power."""

    lower: float
    upper: float

    def __post_init__(self):
        if not 0.0 <= self.lower <= self.upper:
            raise ValueError("bounds must satisfy 0 <= lower <= upper")


@dataclass(frozen=True)
class PowerBudget:
    """Where one device's effective power goes: useful + leaked = P_T.

    At the critical spacing and with the full doubly infinite sub-carrier
    grid, every leaked watt lands on some other sub-carrier, so ici equals
    leaked.
    """

    useful: float
    leaked: float
    ici: float


def _check_velocity(max_velocity_mps: float):
    if not (math.isfinite(max_velocity_mps) and max_velocity_mps >= 0.0):
        raise ValueError("max_velocity_mps must be finite and non-negative")


def _symbol_doppler_span(max_velocity_mps: float, cfg: SystemConfig) -> float:
    # b of the actual symbol window, pi * V * f_c * T_s / c; identical to
    # NormalizedDoppler.b when T_s * df = 1
    return math.pi * max_velocity_mps * cfg.carrier_frequency_hz \
        * cfg.symbol_period_s / cfg.wave_speed_mps


def _useful_kernel(u: float) -> float:
    """Si(2u)/u - sin(u)^2/u^2, the useful-power fraction at Doppler depth u.

    The series branch keeps absolute error below 1e-14 for u < 0.05; going
    through the sine integral there would amplify its error by 1/u.
    """
    if u < 0.05:
        u2 = u * u
        return 1.0 - u2 / 9.0 + u2 * u2 * (2.0 / 225.0) - u2 * u2 * u2 / 2205.0
    s = math.sin(u) / u
    return sine_integral(2.0 * u) / u - s * s


def effective_useful_power(max_velocity_mps: float, cfg: SystemConfig) -> float:
    """Mean power a device keeps on its own sub-carrier despite Doppler.

    Averages the per-direction fraction Si(2 b cos psi)/(b cos psi) -
    sin^2(b cos psi)/(b cos psi)^2 over a uniform quarter circle of arrival
    directions and scales by the common received power.  V_max = 0 returns
    cfg.effective_power exactly.
    """
    _check_velocity(max_velocity_mps)
    if max_velocity_mps == 0.0:
        return cfg.effective_power
    b = _symbol_doppler_span(max_velocity_mps, cfg)
    value = integrate(lambda p: _useful_kernel(b * math.cos(p)),
                      0.0, math.pi / 2.0, _USEFUL_SPEC)
    return cfg.effective_power * (2.0 / math.pi) * value


def _oscillation_splits(gaps: np.ndarray, rate: float, vmax: float):
    """Split [0, vmax] at speeds where the sinc argument crosses an integer.

    Only needed when the argument sweeps more than a few zeros across the
    speed range; the sub-panels then start and end on the sinc nulls, which
    keeps the per-panel rule honest on a strongly oscillatory integrand.
    All gaps in a call differ by integers, so one reference suffices.
    """
    sweep = abs(rate) * vmax
    if sweep <= 4.0:
        return ((0.0, vmax),)
    if sweep > 4.0 * _INNER_SPEC.max_subdivisions:
        # more oscillations than the panel budget could ever resolve
        raise QuadratureError(
            f"integrand sweeps {sweep:.3g} oscillations, beyond the "
            f"subdivision budget of {_INNER_SPEC.max_subdivisions}",
            estimate=math.nan, error_bound=math.inf)
    ref = float(gaps[0])
    lo = ref
    hi = ref + rate * vmax
    a, b = (lo, hi) if lo <= hi else (hi, lo)
    ks = np.arange(math.ceil(a), math.floor(b) + 1, dtype=float)
    vs = np.sort((ks - ref) / rate)
    vs = vs[(vs > 0.0) & (vs < vmax)]
    edges = np.concatenate(([0.0], vs, [vmax]))
    return tuple(zip(edges[:-1], edges[1:]))


def _leakage_multi(gaps_ts, max_velocity_mps: float, cfg: SystemConfig) -> float:
    """Average of sum_g sinc(g + y)^2 over the speed and direction laws.

    Here y = (v * f_c * T_s / c) * cos(psi), speed uniform on [0, V_max] and
    direction uniform on the circle.  ``gaps_ts`` holds the dimensionless
    sub-carrier gaps (frequency gap times T_s).  Each term is even in its
    gap, so gaps are folded to their magnitudes first; exchanging the roles
    of any two sub-carriers therefore reproduces the same value bit for bit.
    """
    gaps = np.sort(np.abs(np.asarray(gaps_ts, dtype=float)))
    if gaps.size == 0:
        return 0.0
    if max_velocity_mps == 0.0:
        s = sinc(gaps)
        return float(np.sum(s * s))
    per_speed = cfg.carrier_frequency_hz * cfg.symbol_period_s / cfg.wave_speed_mps

    def direction_term(psi: float) -> float:
        rate = per_speed * math.cos(psi)

        def speed_profile(v):
            y = rate * v
            s = sinc(gaps[None, :] + y[:, None])
            return np.sum(s * s, axis=1)

        total = 0.0
        for a, b in _oscillation_splits(gaps, rate, max_velocity_mps):
            total += integrate(speed_profile, a, b, _INNER_SPEC)
        return total

    # integrand depends on the direction only through cos(psi), so the
    # [0, pi] half doubles to the full circle
    outer = integrate(direction_term, 0.0, math.pi, _OUTER_SPEC)
    return 2.0 * outer / (2.0 * math.pi * max_velocity_mps)


def leakage(frequency_offset_hz: float, max_velocity_mps: float,
            cfg: SystemConfig) -> float:
    """Fraction of a device's power landing ``frequency_offset_hz`` away
    from its own sub-carrier, averaged over the speed and direction laws.

    Evaluated as the literal double integral of the sinc^2 spreading kernel;
    a static network (V_max = 0) degenerates to sinc(offset * T_s)^2.  The
    result is even in the offset.
    """
    _check_velocity(max_velocity_mps)
    gap_ts = -frequency_offset_hz * cfg.symbol_period_s  # gap from tone to observer
    return _leakage_multi(np.array([gap_ts]), max_velocity_mps, cfg)


def leakage_sum(subcarrier_index: int, half_subcarriers: int,
                max_velocity_mps: float, cfg: SystemConfig) -> float:
    """Total leakage collected on one sub-carrier from every slot j in
    [-N, N], the self term included.

    At the critical spacing this climbs to exactly 1 as N grows (all power
    is accounted for on the grid); for T_s * df >= 2 the grid skips most of
    the spread spectrum and the limit stays strictly below 1.
    """
    _check_velocity(max_velocity_mps)
    n = half_subcarriers
    if n < 0:
        raise ValueError("half_subcarriers must be non-negative")
    i = subcarrier_index
    if not -n <= i <= n:
        raise ValueError(f"sub-carrier index {i} outside [-{n}, {n}]")
    q = cfg.spacing_symbol_product
    gaps = (i - np.arange(-n, n + 1, dtype=float)) * q
    return _leakage_multi(gaps, max_velocity_mps, cfg)


def finite_n_ici(subcarrier_index: int, max_velocity_mps: float,
                 cfg: SystemConfig) -> float:
    """Interference power on one sub-carrier from the 2N actual interferers.

    This is the exact expectation for the finite system the Monte Carlo
    module simulates; it converges to :func:`total_ici_power` from below as
    N grows (the missing tail shrinks like 1/N).
    """
    _check_velocity(max_velocity_mps)
    n = cfg.half_subcarriers
    i = subcarrier_index
    if not -n <= i <= n:
        raise ValueError(f"sub-carrier index {i} outside [-{n}, {n}]")
    if n == 0:
        return 0.0
    q = cfg.spacing_symbol_product
    others = np.array([j for j in range(-n, n + 1) if j != i], dtype=float)
    gaps = (i - others) * q
    return cfg.effective_power * _leakage_multi(gaps, max_velocity_mps, cfg)


def total_ici_power(max_velocity_mps: float, cfg: SystemConfig) -> float:
    """Interference floor with unbounded sub-carriers: P_T minus the useful
    power.  Meaningful as interference at the critical spacing T_s * df = 1,
    where the whole leaked budget lands on active sub-carriers."""
    return cfg.effective_power - effective_useful_power(max_velocity_mps, cfg)


def power_budget(max_velocity_mps: float, cfg: SystemConfig) -> PowerBudget:
    """Split of one device's power into useful and leaked shares."""
    useful = effective_useful_power(max_velocity_mps, cfg)
    leaked = cfg.effective_power - useful
    return PowerBudget(useful=useful, leaked=leaked, ici=leaked)


def ici_bounds(max_velocity_mps: float, cfg: SystemConfig) -> IciBounds:
    """Closed-form sandwich (b^2/18 - b^4/50) P_T <= ici <= (b^2/18 + b^4/60) P_T.

    The lower bound is clamped at zero where the quartic term would push it
    negative (b > sqrt(50/18), far outside the regime the sandwich targets).
    """
    _check_velocity(max_velocity_mps)
    nd = NormalizedDoppler.from_configs(max_velocity_mps, cfg)
    b2 = nd.b * nd.b
    b4 = b2 * b2
    p = cfg.effective_power
    return IciBounds(lower=max(0.0, (b2 / 18.0 - b4 / 50.0)) * p,
                     upper=(b2 / 18.0 + b4 / 60.0) * p)


def ici_approx(max_velocity_mps: float, cfg: SystemConfig) -> float:
    """Leading-order interference estimate (b^2 / 18) * P_T.

    Trust it only below :func:`approx_validity_threshold`, i.e. for b < 1/2.
    """
    _check_velocity(max_velocity_mps)
    nd = NormalizedDoppler.from_configs(max_velocity_mps, cfg)
    return nd.b * nd.b / 18.0 * cfg.effective_power


def approx_validity_threshold(cfg: SystemConfig) -> float:
    """Largest V_max (m/s) for which the quadratic estimate is rated:
    c * df / (2 * pi * f_c), equivalently the speed where b reaches 1/2."""
    return cfg.wave_speed_mps * cfg.subcarrier_spacing_hz \
        / (2.0 * math.pi * cfg.carrier_frequency_hz)


def approx_is_valid(max_velocity_mps: float, cfg: SystemConfig) -> bool:
    """True when ici_approx and capacity_upper_approx are inside their
    rated small-b regime."""
    _check_velocity(max_velocity_mps)
    return max_velocity_mps < approx_validity_threshold(cfg)


def capacity_upper(max_velocity_mps: float, cfg: SystemConfig) -> float:
    """Concavity (Jensen) upper bound on per-device ergodic capacity,
    log2(1 + P_U / (P_ICI + noise)), in bit/s/Hz.

    Raises ValueError when both the interference and the noise are zero
    (static, noiseless network), where the SINR is unbounded.
    """
    useful = effective_useful_power(max_velocity_mps, cfg)
    ici = cfg.effective_power - useful
    denominator = ici + cfg.noise_variance
    if denominator <= 0.0:
        raise ValueError("zero interference and zero noise: SINR is unbounded")
    return math.log2(1.0 + useful / denominator)


def capacity_upper_approx(max_velocity_mps: float, cfg: SystemConfig) -> float:
    """Small-b capacity estimate, (-ln(b^2/18 + noise/P_T) + noise/P_T) * log2(e).

    Shares the validity predicate of :func:`ici_approx`; the predicate is
    advisory and not enforced here.  When the noise ratio is negligible
    against b^2/18 the estimate is log-linear in velocity with slope
    -2*log2(e) bits per e-fold of V.
    """
    _check_velocity(max_velocity_mps)
    nd = NormalizedDoppler.from_configs(max_velocity_mps, cfg)
    noise_ratio = cfg.noise_variance / cfg.effective_power
    argument = nd.b * nd.b / 18.0 + noise_ratio
    if argument <= 0.0:
        raise ValueError("zero interference and zero noise: SINR is unbounded")
    return (-math.log(argument) + noise_ratio) * LOG2_E


def sum_rate_upper(max_velocity_mps: float, cfg: SystemConfig) -> float:
    """Aggregate uplink rate bound in bit/s: bandwidth times the per-device
    capacity bound.  Zero bandwidth gives zero."""
    if cfg.bandwidth_hz == 0.0:
        return 0.0
    return cfg.bandwidth_hz * capacity_upper(max_velocity_mps, cfg)
