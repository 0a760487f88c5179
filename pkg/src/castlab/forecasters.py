"""Concrete forecasters pluggable into the evaluation protocols.

The single-shot linear forecaster refits on every input window it is asked
about; the LLM forecaster serializes each channel into a prompt, samples
completions, and aggregates them by elementwise median. The naive baselines
(last-value repeat, seasonal repeat) are sanity anchors, and the
unregularized polynomial extrapolator is a deliberately noise-brittle
reference used to demonstrate that the harness detects robustness contrasts.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import ShapeMismatchError
from .eval import Forecaster
from .linear import FittedLinearModel, LinearModelConfig, fit_single_shot
from .linear import predict as linear_predict
from .llm.adapters import LlmAdapter, TranscriptWriter
from .llm.decode import DecodingConfig, aggregate_median
from .llm.prompts import ScalingConfig, build_multi_turn_prompts, build_prompt
from .llm.sampling import sample_forecasts
from .series import ForecastTask, validate_series


def _as_window(window: np.ndarray) -> np.ndarray:
    arr = np.asarray(window, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.size == 0:
        raise ShapeMismatchError("input window must be a non-empty (I, d) array")
    return arr


class LastValueForecaster(Forecaster):
    """Repeats the final observation for the whole horizon."""

    family = "domain"

    def __init__(self, name: str = "last-value"):
        self.name = name

    def predict(self, window: np.ndarray, horizon: int) -> np.ndarray:
        arr = _as_window(window)
        return np.tile(arr[-1:], (horizon, 1))


class SeasonalRepeatForecaster(Forecaster):
    """Tiles the last ``period`` observations cyclically across the horizon."""

    family = "domain"

    def __init__(self, period: int, name: str = "seasonal-repeat"):
        if period < 1:
            raise ValueError("period must be >= 1")
        self.period = period
        self.name = name

    def predict(self, window: np.ndarray, horizon: int) -> np.ndarray:
        arr = _as_window(window)
        if arr.shape[0] < self.period:
            raise ShapeMismatchError(
                f"window has {arr.shape[0]} rows, period needs {self.period}"
            )
        season = arr[-self.period :]
        reps = -(-horizon // self.period)
        return np.tile(season, (reps, 1))[:horizon]


class PolynomialExtrapolator(Forecaster):
    """Unregularized high-degree polynomial fit per channel, extrapolated.

    Coefficients come from a plain least-squares fit on the trailing
    ``fit_span`` points of the input window (time rescaled to [0, 1]); the
    polynomial is then evaluated beyond 1. High degrees make the
    extrapolation exquisitely sensitive to input noise, which is exactly
    the point of this baseline.
    """

    family = "domain"

    def __init__(self, degree: int = 12, fit_span: int | None = None,
                 name: str = "poly-extrapolator"):
        if degree < 1:
            raise ValueError("degree must be >= 1")
        if fit_span is not None and fit_span <= degree:
            raise ValueError("fit_span must exceed degree")
        self.degree = degree
        self.fit_span = fit_span
        self.name = name

    def predict(self, window: np.ndarray, horizon: int) -> np.ndarray:
        arr = _as_window(window)
        if self.fit_span is not None:
            arr = arr[-self.fit_span :]
        n = arr.shape[0]
        if n <= self.degree:
            raise ShapeMismatchError(
                f"window length {n} cannot support degree {self.degree}"
            )
        t = np.arange(n, dtype=np.float64) / (n - 1)
        t_future = (np.arange(n, n + horizon, dtype=np.float64)) / (n - 1)
        out = np.empty((horizon, arr.shape[1]))
        for c in range(arr.shape[1]):
            coeffs = np.polynomial.polynomial.polyfit(t, arr[:, c], self.degree)
            out[:, c] = np.polynomial.polynomial.polyval(t_future, coeffs)
        return out


class LinearSingleShotForecaster(Forecaster):
    """Single-shot linear model refit on each input window it predicts from."""

    family = "linear"

    def __init__(self, config: LinearModelConfig, val_fraction: float = 0.2, name: str | None = None):
        self.config = config
        self.val_fraction = val_fraction
        self.name = name or f"{config.variant}-s"
        self.model: FittedLinearModel | None = None

    def fit(self, window: np.ndarray, horizon: int) -> None:
        arr = _as_window(window)
        series = validate_series(arr)
        task = ForecastTask(input_length=arr.shape[0], output_length=horizon)
        self.model = fit_single_shot(series, task, self.config, self.val_fraction)

    def predict(self, window: np.ndarray, horizon: int) -> np.ndarray:
        if self.model is None:
            self.fit(window, horizon)
        arr = _as_window(window)
        assert self.model is not None
        return linear_predict(self.model, arr[-self.model.inner_input :], horizon)


class LlmPromptForecaster(Forecaster):
    """Prompt-based forecaster over a pluggable completion adapter.

    Each channel is serialized independently (the prompt count equals the
    channel count), sampled ``num_samples`` times concurrently, decoded, and
    median-aggregated. The affine scaling is derived per channel unless an
    explicit one is supplied, and is recorded in the transcript.
    """

    family = "llm"

    def __init__(
        self,
        adapter: LlmAdapter,
        style: str = "llmtime_chat",
        decoding: DecodingConfig | None = None,
        decimals: int = 0,
        scaling: ScalingConfig | None = None,
        shots: int = 3,
        multi_turn: bool = False,
        transcript: TranscriptWriter | None = None,
        channel_concurrency: int = 1,
        name: str | None = None,
    ):
        self.adapter = adapter
        self.style = style
        self.decoding = decoding or DecodingConfig()
        self.decimals = decimals
        self.scaling = scaling
        self.shots = shots
        # one completion per horizon step; off by default because cost scales with O
        self.multi_turn = multi_turn
        self.transcript = transcript
        self.channel_concurrency = max(1, channel_concurrency)
        self.name = name or style

    def _predict_channel(self, values: np.ndarray, horizon: int, channel: int) -> np.ndarray:
        scaling = self.scaling or ScalingConfig.from_values(values, decimals=self.decimals)
        context = {"channel": channel, "forecaster": self.name}
        if self.multi_turn:
            steps = []
            for bundle in build_multi_turn_prompts(values, horizon, scaling):
                samples = sample_forecasts(
                    self.adapter, bundle, self.decoding,
                    transcript=self.transcript, transcript_context=context,
                )
                steps.append(aggregate_median([s.values for s in samples])[0])
            return np.asarray(steps)
        bundle = build_prompt(values, horizon, self.style, scaling, shots=self.shots)
        samples = sample_forecasts(
            self.adapter,
            bundle,
            self.decoding,
            transcript=self.transcript,
            transcript_context=context,
        )
        return aggregate_median([s.values for s in samples])

    def predict(self, window: np.ndarray, horizon: int) -> np.ndarray:
        arr = _as_window(window)
        channels = range(arr.shape[1])
        if self.channel_concurrency == 1 or arr.shape[1] == 1:
            columns = [self._predict_channel(arr[:, c], horizon, c) for c in channels]
        else:
            with ThreadPoolExecutor(max_workers=self.channel_concurrency) as pool:
                columns = list(
                    pool.map(lambda c: self._predict_channel(arr[:, c], horizon, c), channels)
                )
        return np.column_stack(columns)
