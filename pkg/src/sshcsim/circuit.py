"""Physical value types for the harvester front-end and the parameter-only formulas.

The piezo harvester is modeled as a sinusoidal current source in parallel with
its plate capacitance (and an optional leakage resistor), feeding a four-diode
bridge into a storage element. Everything here is a pure function of the
parameters; time-domain behavior lives in :mod:`sshcsim.transient`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union


@dataclass(frozen=True)
class PiezoSource:
    """Sinusoidal current source I(t) = amplitude_ip * sin(2*pi*frequency*t)
    in parallel with plate capacitance cap_cp and leakage res_rp
    (math.inf = no leakage)."""

    amplitude_ip: float  # A
    frequency: float     # Hz
    cap_cp: float        # F
    res_rp: float = math.inf  # ohm

    def __post_init__(self):
        if not self.amplitude_ip > 0:
            raise ValueError("amplitude_ip must be > 0")
        if not self.frequency > 0:
            raise ValueError("frequency must be > 0")
        if not self.cap_cp > 0:
            raise ValueError("cap_cp must be > 0")
        if not self.res_rp > 0:
            raise ValueError("res_rp must be > 0 or math.inf")

    @property
    def omega(self) -> float:
        return 2.0 * math.pi * self.frequency

    @property
    def period(self) -> float:
        return 1.0 / self.frequency

    def current(self, t: float) -> float:
        """Instantaneous source current at time t (A)."""
        return self.amplitude_ip * math.sin(self.omega * t)


@dataclass(frozen=True)
class FixedVoltage:
    """Ideal storage: the output rail is pinned at vs regardless of harvested charge."""

    vs: float  # V

    def __post_init__(self):
        if self.vs < 0:
            raise ValueError("vs must be >= 0")


@dataclass(frozen=True)
class FiniteCap:
    """Finite storage capacitor cs starting at vs_initial; the rail rises as charge arrives."""

    cs: float          # F
    vs_initial: float = 0.0  # V

    def __post_init__(self):
        if not self.cs > 0:
            raise ValueError("cs must be > 0")
        if self.vs_initial < 0:
            raise ValueError("vs_initial must be >= 0")


Storage = Union[FixedVoltage, FiniteCap]


@dataclass(frozen=True)
class RectifierStage:
    """Full-bridge rectifier with per-diode drop diode_drop_vd into a storage element."""

    diode_drop_vd: float
    storage: Storage = field(default_factory=lambda: FixedVoltage(0.0))

    def __post_init__(self):
        if self.diode_drop_vd < 0:
            raise ValueError("diode_drop_vd must be >= 0")

    @property
    def storage_voltage(self) -> float:
        """Current (or initial) storage rail voltage."""
        if isinstance(self.storage, FixedVoltage):
            return self.storage.vs
        return self.storage.vs_initial


@dataclass(frozen=True)
class SshcNetwork:
    """Temporary flip capacitor cap_ct and its stored plate voltage volt_vt.

    Sign convention: volt_vt is the voltage of the C_T plate that connects to
    the positive harvester terminal during the like-polarity share phase.
    """

    cap_ct: float       # F
    volt_vt: float = 0.0  # V

    def __post_init__(self):
        if not self.cap_ct > 0:
            raise ValueError("cap_ct must be > 0")


def conduction_threshold(stage: RectifierStage) -> float:
    """Bridge conduction threshold: |V_PT| at which diodes conduct, vs + 2*vd."""
    return stage.storage_voltage + 2.0 * stage.diode_drop_vd


def wasted_charge_fullbridge(src: PiezoSource, stage: RectifierStage) -> float:
    """Charge spent swinging cap_cp between the two conduction thresholds in a
    half vibration cycle: 2 * cap_cp * (vs + 2*vd). None of it reaches storage."""
    return 2.0 * src.cap_cp * conduction_threshold(stage)


def open_circuit_vpp(src: PiezoSource) -> float:
    """Peak-to-peak open-circuit voltage: the half-sine charge 2*Ip/omega
    integrated into cap_cp. Only defined for a leak-free source."""
    if math.isfinite(src.res_rp):
        raise ValueError(
            "open_circuit_vpp requires res_rp = inf; with leakage the "
            "peak-to-peak swing is load-dependent"
        )
    return 2.0 * src.amplitude_ip / (src.omega * src.cap_cp)


def full_swing_supported(src: PiezoSource, stage: RectifierStage) -> bool:
    """True when the (idealized, leak-free) open-circuit swing exceeds twice the
    conduction threshold, i.e. V_PT re-reaches the clamp rails every half cycle.

    The cycle-constant pre-flip voltage assumed by the closed-form flip series
    only holds in this regime.
    """
    vpp = 2.0 * src.amplitude_ip / (src.omega * src.cap_cp)
    return vpp > 2.0 * conduction_threshold(stage)
