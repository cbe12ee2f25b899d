"""Storage capacity of an Information Battery and its lithium-ion equivalent."""

from __future__ import annotations

from dataclasses import dataclass

J_PER_KWH = 3.6e6
HOURS_PER_YEAR = 8760

LITHIUM_ION_USD_PER_KWH = 356.0
GRID_STORAGE_USD_PER_KWH = 209.0


@dataclass(frozen=True)
class IBCapacitySpec:
    power_draw: float
    horizon: float
    accuracy: float = 1.0

    def __post_init__(self):
        if self.power_draw < 0 or self.horizon < 0:
            raise ValueError("power_draw and horizon must be non-negative")
        if not 0.0 <= self.accuracy <= 1.0:
            raise ValueError(f"accuracy must be in [0, 1], got {self.accuracy}")


@dataclass(frozen=True)
class BatteryQuote:
    capacity_kwh: float
    price_per_kwh: float
    total_usd: float


def ib_capacity(spec: IBCapacitySpec) -> float:
    """Joules storable: charge rate (W) x prediction horizon (s) x accuracy."""
    return spec.power_draw * spec.horizon * spec.accuracy


def battery_equivalent(energy_joules: float, price_per_kwh: float = LITHIUM_ION_USD_PER_KWH) -> BatteryQuote:
    if energy_joules < 0:
        raise ValueError("energy must be non-negative")
    if price_per_kwh < 0:
        raise ValueError("price_per_kwh must be non-negative")
    kwh = energy_joules / J_PER_KWH
    return BatteryQuote(kwh, price_per_kwh, kwh * price_per_kwh)


def naive_storage_cost(
    opportunity_twh_per_year: float, price_per_kwh: float = GRID_STORAGE_USD_PER_KWH, hours: float = 1.0
) -> float:
    """Battery cost to hold ``hours`` of the average opportunity-power flow."""
    if min(opportunity_twh_per_year, price_per_kwh, hours) < 0:
        raise ValueError("inputs must be non-negative")
    kwh_per_hour = opportunity_twh_per_year * 1e9 / HOURS_PER_YEAR
    return kwh_per_hour * hours * price_per_kwh
