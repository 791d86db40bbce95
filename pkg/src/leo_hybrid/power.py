"""Static power consumption of the satellite transmitter."""

import enum
from dataclasses import dataclass

from ._validation import check_int, check_positive
from .npa import NpaModel, pa_power

__all__ = [
    "Architecture",
    "ComponentPowers",
    "ArchitectureSpec",
    "PHASE_SHIFTER_POWER_W",
    "phase_shifter_power",
    "transmitter_power",
    "total_power",
]

# Phase shifter power draw keyed by resolution in bits.
PHASE_SHIFTER_POWER_W = {2: 10e-3, 4: 20e-3}


def phase_shifter_power(bits, table=None):
    table = PHASE_SHIFTER_POWER_W if table is None else table
    try:
        return table[bits]
    except KeyError:
        raise ValueError(
            f"no phase shifter power configured for {bits}-bit resolution; "
            f"known resolutions: {sorted(table)}"
        ) from None


class Architecture(enum.Enum):
    FULLY_TRPS = "fully_trps"
    PARTIALLY_TRPS = "partially_trps"
    FULLY_DIGITAL = "fully_digital"
    FULLY_HRPS = "fully_hrps"
    FULLY_LRPS = "fully_lrps"
    PARTIALLY_HRPS = "partially_hrps"
    PARTIALLY_LRPS = "partially_lrps"

    @property
    def is_digital(self):
        return self is Architecture.FULLY_DIGITAL

    @property
    def is_fully_connected(self):
        return self.value.startswith("fully_") and not self.is_digital

    @property
    def is_partially_connected(self):
        return self.value.startswith("partially_")

    @property
    def resolution(self):
        """'twin', 'high', 'low' or None for the fully digital transmitter."""
        if self.is_digital:
            return None
        return {"trps": "twin", "hrps": "high", "lrps": "low"}[self.value.split("_")[1]]


@dataclass(frozen=True)
class ComponentPowers:
    """Per-component power draw in watts.

    ``p_rfc`` is the aggregate of DAC, mixer, low-pass filter and baseband
    amplifier of one RF chain. Defaults are 2-bit/4-bit phase shifters.
    """

    p_lps: float = 10e-3
    p_hps: float = 20e-3
    p_rfc: float = 338e-3
    p_lo: float = 5e-3
    p_bb: float = 200e-3
    p_sw: float = 1e-3

    def __post_init__(self):
        for name in ("p_lps", "p_hps", "p_rfc", "p_lo", "p_bb", "p_sw"):
            check_positive(getattr(self, name), name, strict=False)

    @classmethod
    def for_resolutions(cls, r_high, r_low, table=None, **kwargs):
        return cls(
            p_lps=phase_shifter_power(r_low, table),
            p_hps=phase_shifter_power(r_high, table),
            **kwargs,
        )


@dataclass(frozen=True)
class ArchitectureSpec:
    """Transmitter architecture and phase shifter counts.

    Attributes
    ----------
    kind : Architecture
    nt : int
        Number of antennas.
    mt : int
        Number of RF chains (ignored by the fully digital transmitter).
    n_high, n_low : int
        High- and low-resolution phase shifter counts. They must add up to
        ``nt * mt`` (fully connected) or ``nt`` (partially connected).
    """

    kind: Architecture
    nt: int
    mt: int
    n_high: int = 0
    n_low: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", Architecture(self.kind))
        check_int(self.nt, "nt", minimum=1)
        check_int(self.mt, "mt", minimum=1)
        check_int(self.n_high, "n_high", minimum=0)
        check_int(self.n_low, "n_low", minimum=0)
        if self.mt > self.nt:
            raise ValueError(f"mt={self.mt} RF chains exceed nt={self.nt} antennas")
        if self.kind.is_partially_connected and self.nt % self.mt:
            raise ValueError(
                f"partially connected arrays need nt divisible by mt, got {self.nt}/{self.mt}"
            )
        if self.kind.is_digital:
            return
        total = self.n_shifters
        if self.n_high + self.n_low != total:
            raise ValueError(
                f"{self.kind.value}: n_high + n_low = {self.n_high + self.n_low}, "
                f"expected {total} phase shifters"
            )
        if self.kind.resolution == "high" and self.n_low:
            raise ValueError("HRPS networks have no low-resolution phase shifters")
        if self.kind.resolution == "low" and self.n_high:
            raise ValueError("LRPS networks have no high-resolution phase shifters")

    @classmethod
    def build(cls, kind, nt, mt, hi_res_ratio=0.5):
        """Spec with ``round(hi_res_ratio * n_shifters)`` high-resolution shifters.

        The ratio only matters for twin-resolution kinds; HRPS and LRPS use
        a single resolution.
        """
        kind = Architecture(kind)
        if kind.is_digital:
            return cls(kind, nt, nt)
        total = nt * mt if kind.is_fully_connected else nt
        if kind.resolution == "high":
            n_high = total
        elif kind.resolution == "low":
            n_high = 0
        else:
            if not 0.0 <= hi_res_ratio <= 1.0:
                raise ValueError(f"hi_res_ratio must lie in [0, 1], got {hi_res_ratio}")
            n_high = int(round(hi_res_ratio * total))
        return cls(kind, nt, mt, n_high, total - n_high)

    @property
    def n_shifters(self):
        if self.kind.is_digital:
            return 0
        return self.nt * self.mt if self.kind.is_fully_connected else self.nt

    @property
    def ng(self):
        """Antennas per RF chain in the partially connected array."""
        return self.nt // self.mt

    @property
    def hi_res_ratio(self):
        return self.n_high / self.n_shifters if self.n_shifters else float("nan")


def transmitter_power(spec: ArchitectureSpec, comps: ComponentPowers) -> float:
    """Static transmitter power ``P_t`` (everything except the PAs).

    Only active switches draw power: ``nt * mt`` for the fully connected
    TRPS network and ``nt`` for the partially connected one. Single
    resolution networks have no switches.
    """
    common = comps.p_lo + comps.p_bb
    kind = spec.kind
    if kind.is_digital:
        return spec.nt * comps.p_rfc + common
    shifters = spec.n_low * comps.p_lps + spec.n_high * comps.p_hps
    rf = spec.mt * comps.p_rfc
    if kind.resolution != "twin":
        return shifters + rf + common
    n_switches = spec.nt * spec.mt if kind.is_fully_connected else spec.nt
    return shifters + rf + common + n_switches * comps.p_sw


def total_power(spec: ArchitectureSpec, comps: ComponentPowers, npa: NpaModel, B) -> float:
    """``P_PA(B) + P_t``."""
    if B.shape[0] != spec.nt:
        raise ValueError(f"precoder has {B.shape[0]} rows, architecture has nt={spec.nt}")
    if not spec.kind.is_digital and B.shape[1] > spec.mt:
        raise ValueError(f"{B.shape[1]} users exceed mt={spec.mt} RF chains")
    return pa_power(npa, B) + transmitter_power(spec, comps)
