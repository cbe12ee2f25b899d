"""Opportunity-power prediction.

Two pieces live here:

* hour-ahead price forecasters (persistence and least-squares
  autoregressive baselines) scored by mean-absolute error on min-max
  normalised prices;
* a confusion-matrix classifier whose false-positive / false-negative
  behaviour is set directly, which is how the simulator consumes price
  prediction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _rng
from .trace import PriceTrace

HORIZON = 12
MODELS = ("persistence", "ar")
DEFAULT_AR_ORDER = 12

# Reference MAE of an LSTM predictor on real market data; not comparable to the
# baselines here (different normalisation and data).
REFERENCE_MAE = {
    ("CAISO", "validation"): 0.1181,
    ("CAISO", "train"): 0.1402,
    ("MISO", "validation"): 0.0745,
    ("MISO", "train"): 0.0614,
}


class InsufficientHistoryError(ValueError):
    pass


@dataclass(frozen=True)
class PriceForecast:
    origin: int
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != HORIZON:
            raise ValueError(f"forecast must have {HORIZON} values, got {len(self.values)}")
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("forecast contains non-finite values")


@dataclass(frozen=True)
class ClassifierSpec:
    fp_rate: float = 0.0
    fn_rate: float = 0.0
    threshold: float = 0.0
    seed: int = 0

    def __post_init__(self):
        for name in ("fp_rate", "fn_rate"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")


@dataclass(frozen=True)
class ForecastScore:
    model: str
    dataset: str
    split: str
    mae: float


def context_length(model: str, order: int = DEFAULT_AR_ORDER) -> int:
    if model == "persistence":
        return 1
    if model == "ar":
        return order
    raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")


def fit_ar(series, order: int = DEFAULT_AR_ORDER) -> np.ndarray:
    """Least-squares AR(order) coefficients with intercept.

    Returns ``[c, a_1, ..., a_order]`` so that
    ``x[t] ~ c + sum_i a_i * x[t - i]``. Uses the minimum-norm solution
    when the design is rank deficient (e.g. on a perfect ramp).
    """
    x = np.asarray(series, dtype=np.float64)
    if order < 1:
        raise ValueError("order must be >= 1")
    if len(x) <= order:
        raise InsufficientHistoryError(f"AR({order}) needs more than {order} points, got {len(x)}")
    rows = len(x) - order
    design = np.empty((rows, order + 1))
    design[:, 0] = 1.0
    for i in range(1, order + 1):
        design[:, i] = x[order - i : len(x) - i]
    coef, *_ = np.linalg.lstsq(design, x[order:], rcond=None)
    return coef


def _ar_rollout(coef: np.ndarray, history: np.ndarray, steps: int) -> np.ndarray:
    order = len(coef) - 1
    window = list(history[-order:])
    out = np.empty(steps)
    for s in range(steps):
        # window[-i] is x[t - i]
        nxt = coef[0] + sum(coef[i] * window[-i] for i in range(1, order + 1))
        out[s] = nxt
        window.append(nxt)
    return out


def predict_next_hour(
    history,
    model: str = "persistence",
    order: int = DEFAULT_AR_ORDER,
    coef: np.ndarray | None = None,
    origin: int = 0,
) -> PriceForecast:
    """Forecast the next 12 five-minute prices.

    For ``model="ar"`` the coefficients are fitted on ``history`` unless
    pre-fitted ``coef`` are supplied.
    """
    x = np.asarray(history, dtype=np.float64)
    if coef is not None and model == "ar":
        order = len(coef) - 1
    need = context_length(model, order)
    if len(x) < need:
        raise InsufficientHistoryError(f"{model} needs at least {need} history values, got {len(x)}")
    if model == "persistence":
        values = np.full(HORIZON, x[-1])
    else:
        if coef is None:
            coef = fit_ar(x, order)
        values = _ar_rollout(coef, x, HORIZON)
    return PriceForecast(origin, tuple(float(v) for v in values))


def classify_interval(actual_negative: bool, spec: ClassifierSpec, interval_index: int) -> bool:
    """Predicted-negative flag for one interval.

    True with probability ``1 - fn_rate`` when the interval really is
    negative, with probability ``fp_rate`` otherwise. A single uniform per
    ``(seed, interval_index)`` drives both branches, so the output is
    stateless and monotone in each rate.
    """
    u = _rng.uniform(spec.seed, _rng.STREAM_PRICE, interval_index)
    if actual_negative:
        return u >= spec.fn_rate
    return u < spec.fp_rate


def classify_array(actual_negative: np.ndarray, spec: ClassifierSpec, offset: int = 0) -> np.ndarray:
    """Vectorised :func:`classify_interval` for intervals ``offset..offset+n-1``."""
    actual = np.asarray(actual_negative, dtype=bool)
    u = _rng.uniform_array(spec.seed, _rng.STREAM_PRICE, np.arange(offset, offset + len(actual)))
    return np.where(actual, u >= spec.fn_rate, u < spec.fp_rate)


def _split_bounds(n: int, split: tuple[float, float]) -> tuple[int, int]:
    train_frac, val_frac = split
    if train_frac <= 0 or val_frac <= 0 or train_frac + val_frac > 1.0 + 1e-12:
        raise ValueError(f"bad split {split}")
    train_end = int(round(n * train_frac))
    val_end = min(n, train_end + int(round(n * val_frac)))
    return train_end, val_end


def _rolling_mae(x: np.ndarray, lo: int, hi: int, need: int, forecast, stride: int) -> float:
    errs = []
    for origin in range(max(lo, need), hi - HORIZON + 1, stride):
        pred = forecast(x[:origin])
        errs.append(np.abs(pred - x[origin : origin + HORIZON]).mean())
    if not errs:
        raise InsufficientHistoryError("split too short for a single context + horizon window")
    return float(np.mean(errs))


def score_mae(
    model: str,
    trace: PriceTrace,
    split: tuple[float, float] = (0.8, 0.2),
    order: int = DEFAULT_AR_ORDER,
    stride: int = HORIZON,
    dataset: str | None = None,
) -> list[ForecastScore]:
    """Train and validation MAE of rolling-origin hour-ahead forecasts.

    Prices are min-max normalised with the training split's range. The
    AR coefficients are fitted once on the training split. Origins advance
    by ``stride`` intervals. Returns ``[train_score, validation_score]``.
    """
    need = context_length(model, order)
    raw = np.asarray(trace.lmp, dtype=np.float64)
    train_end, val_end = _split_bounds(len(raw), split)
    if train_end < need + HORIZON or val_end - train_end < HORIZON:
        raise InsufficientHistoryError(
            f"trace of {len(raw)} intervals too short for {model} with split {split}"
        )
    lo, hi = raw[:train_end].min(), raw[:train_end].max()
    span = hi - lo if hi > lo else 1.0
    x = (raw - lo) / span

    if model == "persistence":
        def forecast(h):
            return np.full(HORIZON, h[-1])
    else:
        coef = fit_ar(x[:train_end], order)

        def forecast(h):
            return _ar_rollout(coef, h, HORIZON)

    label = dataset or trace.node
    return [
        ForecastScore(model, label, "train", _rolling_mae(x, 0, train_end, need, forecast, stride)),
        ForecastScore(model, label, "validation", _rolling_mae(x, train_end, val_end, need, forecast, stride)),
    ]
