"""Parsing and pretty-printing of durations, powers and energies."""

from __future__ import annotations

import re

_NUM = r"([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)"

_DURATION = {
    "": 1.0, "ns": 1e-9, "us": 1e-6, "µs": 1e-6, "ms": 1e-3, "s": 1.0, "sec": 1.0,
    "m": 60.0, "min": 60.0, "h": 3600.0, "hr": 3600.0, "d": 86400.0, "day": 86400.0,
}
_POWER = {"": 1.0, "w": 1.0, "kw": 1e3, "mw": 1e6, "gw": 1e9}


def _split(text: str, table: dict, what: str, fold_case: bool = False) -> float:
    if isinstance(text, (int, float)):
        return float(text)
    m = re.fullmatch(_NUM + r"\s*([a-zA-Zµ]*)", text.strip())
    unit = m.group(2).lower() if m and fold_case else (m.group(2) if m else None)
    if not m or unit not in table:
        raise ValueError(f"cannot parse {what} {text!r}")
    return float(m.group(1)) * table[unit]


def parse_duration(text) -> float:
    """``"100ms"``, ``"10s"``, ``"90min"``, ``"24h"`` or a bare number of seconds."""
    return _split(text, _DURATION, "duration")


def parse_power(text) -> float:
    """Watts from ``"100MW"``, ``"2.5kW"``, ``"40W"`` or a bare number."""
    return _split(text, _POWER, "power", fold_case=True)


def format_energy(joules: float) -> str:
    for factor, unit in ((1e15, "PJ"), (1e12, "TJ"), (1e9, "GJ"), (1e6, "MJ"), (1e3, "kJ")):
        if abs(joules) >= factor:
            return f"{joules / factor:.4g} {unit}"
    return f"{joules:.4g} J"


def format_usd(amount: float) -> str:
    if abs(amount) >= 1e9:
        return f"${amount / 1e9:.4g}B"
    if abs(amount) >= 1e6:
        return f"${amount / 1e6:.4g}M"
    return f"${amount:,.2f}"
