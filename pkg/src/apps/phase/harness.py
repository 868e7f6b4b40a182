"""
Synthetic goal-phase scenarios standing in for the body network and the
motion matcher.
"""

import csv
import io
import logging
from dataclasses import dataclass, field

import numpy as np
from django.core.exceptions import ValidationError
from scipy.spatial.transform import Rotation

from src.apps.common.artifacts import atomic_write_text
from src.apps.common.rotations import homogeneous

from .constants import (
    HAND_KEYJOINTS,
    DeviationConfig,
    ErrorMessages,
    FilterVariant,
    HarnessConfig,
    KalmanConfig,
    Keyjoint,
    MeasurementSource,
    PhaseConfig,
)
from .kalman import GoalEvent, PredictedSample, process_noise, track
from .state import A, F, S, Measurement, PhaseState, PhaseVector, wrapped_difference


logger = logging.getLogger(__name__)


def control_matrix(beta=HarnessConfig.CONTROL_BLEND):
    return np.diag([beta, 1.0, 1.0])


def simulate_goal(initial, steps, dt, control_std=HarnessConfig.CONTROL_STD,
                  beta=HarnessConfig.CONTROL_BLEND, seed=None):
    """
    Ground-truth goal phases ``X' = A X + B U`` with a zero-mean Gaussian
    control ``U``. Returns ``steps + 1`` states starting at ``initial``.
    """
    if not dt > 0.0:
        raise ValidationError(ErrorMessages.BAD_DT)
    rng = np.random.default_rng(seed)
    dynamics = np.eye(3)
    dynamics[S, F] = dt
    blend = control_matrix(beta)
    state = initial
    states = [state]
    for _ in range(steps):
        control = rng.normal(0.0, control_std, size=(len(state), 3))
        values = state.as_array() @ dynamics.T + control @ blend.T
        state = PhaseState.from_array(values, state.max_frequency)
        states.append(state)
    return states


def embed_and_noise(state, sigma=HarnessConfig.MEASUREMENT_NOISE, seed=None):
    """
    Embedded phase features with independent Gaussian noise on both pair
    components and on the frequency.
    """
    if sigma < 0.0:
        raise ValidationError(ErrorMessages.BAD_SIGMA)
    rng = np.random.default_rng(seed)
    exact = PhaseVector.embed(state)
    noise = rng.normal(0.0, sigma, size=(len(state), 3))
    return PhaseVector(exact.pairs + noise[:, :2], exact.frequency + noise[:, 2])


def keyjoint_transforms(confidence=0.0, body_width=DeviationConfig.BODY_WIDTH, hand="right",
                        hand_offset=HarnessConfig.HAND_OFFSET):
    """
    Forward, goal-centric and goal keyjoint transforms whose deviation
    equals ``confidence``. The root stands on its goal; the hands are
    ``hand_offset`` short of theirs.
    """
    goal_rotation = Rotation.from_euler("z", 30.0, degrees=True).as_matrix()
    goal_positions = {
        Keyjoint.HIP: (0.0, 0.0, 0.95),
        Keyjoint.LEFT_HAND: (-0.2, 0.55, 1.0),
        Keyjoint.RIGHT_HAND: (0.2, 0.55, 1.0),
    }
    goals, ego, inv = {}, {}, {}
    for keyjoint, position in goal_positions.items():
        goals[keyjoint] = homogeneous(goal_rotation, position)
        reach = 0.0 if keyjoint == Keyjoint.HIP else hand_offset
        ego[keyjoint] = homogeneous(np.eye(3), np.asarray(position) - (0.0, reach, 0.0))
        inv[keyjoint] = np.linalg.inv(goals[keyjoint]) @ ego[keyjoint]

    active = HAND_KEYJOINTS[str(hand)]
    shifted = ego[active].copy()
    shifted[0, 3] += confidence * body_width
    inv[active] = np.linalg.inv(goals[active]) @ shifted
    return ego, inv, goals


def perturbed(state, sigma, rng):
    noise = rng.normal(0.0, sigma, size=(len(state), 3)) if sigma > 0.0 else np.zeros((len(state), 3))
    return PhaseState.from_array(state.as_array() + noise, state.max_frequency)


class NoisyPredictionSource:
    """
    Unbiased stand-in for the body network: the true goal plus Gaussian
    noise, with keyjoint transforms reporting a fixed confidence. All
    samples are drawn up front so repeated runs see the same values.
    """

    def __init__(self, truth, sigma=HarnessConfig.MEASUREMENT_NOISE, seed=None,
                 confidence=HarnessConfig.CONFIDENCE, body_width=DeviationConfig.BODY_WIDTH, hand="right"):
        if sigma < 0.0:
            raise ValidationError(ErrorMessages.BAD_SIGMA)
        rng = np.random.default_rng(seed)
        self.measurements = [perturbed(state, sigma, rng) for state in truth]
        self.transforms = keyjoint_transforms(confidence, body_width, hand)

    def __call__(self, step, time, estimate):
        ego, inv, goals = self.transforms
        return PredictedSample(self.measurements[step], ego, inv, goals)


def matched_events(truth, times, bias=HarnessConfig.MATCH_BIAS, drift=HarnessConfig.BIAS_DRIFT,
                   period=HarnessConfig.BIAS_PERIOD, hand="right", variances=KalmanConfig.STATISTICAL_VARIANCE):
    """
    One matched prior per step: the true goal with its phase offset by a
    slowly varying bias. Each carries the process noise as covariance.
    """
    covariance = process_noise(variances)
    events = []
    for state, time in zip(truth, times):
        offset = bias + drift * np.sin(2.0 * np.pi * time / period)
        value = PhaseState.from_array(
            state.as_array() + np.outer(np.ones(len(state)), (offset, 0.0, 0.0)),
            state.max_frequency,
        )
        events.append(GoalEvent(float(time), Measurement(value, covariance, MeasurementSource.MATCHED), hand))
    return events


def phase_rmse(trace, truth, burn_in=HarnessConfig.BURN_IN):
    """
    RMS wrapped phase error of the tracked estimates against ``truth``,
    ignoring the first ``burn_in`` fraction of the steps.
    """
    count = min(len(trace), len(truth))
    first = int(burn_in * count)
    errors = [
        wrapped_difference(trace.estimates[k].mean.phase, truth[k].phase)
        for k in range(first, count)
    ]
    return float(np.sqrt(np.mean(np.square(errors))))


@dataclass(frozen=True)
class Scenario:
    """
    Parameters of a synthetic tracking run.
    """
    channels: int = PhaseConfig.CHANNELS
    dt: float = 1.0 / PhaseConfig.FRAME_RATE
    horizon: float = HarnessConfig.HORIZON
    seed: int = 0
    noise: float = HarnessConfig.MEASUREMENT_NOISE
    match_bias: float = HarnessConfig.MATCH_BIAS
    bias_drift: float = HarnessConfig.BIAS_DRIFT
    confidence: float = HarnessConfig.CONFIDENCE
    body_width: float = DeviationConfig.BODY_WIDTH
    hand: str = "right"
    initial: dict = field(default=None)
    control_std: tuple = HarnessConfig.CONTROL_STD

    @classmethod
    def from_dict(cls, data):
        known = {name: value for name, value in data.items() if name in cls.__dataclass_fields__}
        if "control_std" in known:
            known["control_std"] = tuple(known["control_std"])
        return cls(**known)

    def initial_state(self):
        if self.initial is not None:
            return PhaseState.from_dict(self.initial)
        rng = np.random.default_rng(self.seed)
        return PhaseState(
            rng.uniform(0.0, 1.0, self.channels),
            rng.uniform(0.3, 0.9, self.channels),
            rng.uniform(0.5, 3.0, self.channels),
        )

    @property
    def steps(self):
        return int(round(self.horizon / self.dt))

    def build(self):
        """
        Ground truth, the prediction source and the matched events.
        """
        truth = simulate_goal(self.initial_state(), self.steps, self.dt, self.control_std, seed=self.seed)
        times = np.arange(len(truth)) * self.dt
        source = NoisyPredictionSource(
            truth, self.noise, self.seed + 1, self.confidence, self.body_width, self.hand,
        )
        events = matched_events(truth, times, self.match_bias, self.bias_drift, hand=self.hand)
        return truth, source, events


def run_variant(variant, events, source, horizon, dt, body_width=DeviationConfig.BODY_WIDTH):
    return track(
        events,
        source,
        horizon,
        dt,
        body_width=body_width,
        use_predicted=variant in (FilterVariant.PREDICTED, FilterVariant.FUSED),
        use_matched=variant in (FilterVariant.MATCHED, FilterVariant.FUSED),
    )


def compare_filters(truth, events, source, horizon, dt, body_width=DeviationConfig.BODY_WIDTH,
                    burn_in=HarnessConfig.BURN_IN):
    """
    Phase RMSE of the predicted-only, matched-only and fused filters on
    one scenario.
    """
    results = {}
    for variant in FilterVariant:
        trace = run_variant(variant, events, source, horizon, dt, body_width)
        results[variant.value] = phase_rmse(trace, truth, burn_in)
    logger.info("Filter comparison: %s", {name: round(value, 4) for name, value in results.items()})
    return results


TRACE_COLUMNS = ("step", "time", "channel", "S", "A", "F", "trace_P")


def trace_csv(trace, run_config=None):
    buffer = io.StringIO()
    if run_config is not None:
        buffer.write(f"# config_hash={run_config.digest}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    for step, (time, estimate) in enumerate(zip(trace.times, trace.estimates)):
        values = estimate.mean.as_array()
        traces = estimate.trace
        for channel in range(len(values)):
            writer.writerow([
                step,
                repr(float(time)),
                channel,
                repr(float(values[channel, S])),
                repr(float(values[channel, A])),
                repr(float(values[channel, F])),
                repr(float(traces[channel])),
            ])
    return buffer.getvalue()


def write_trace_csv(path, trace, run_config=None):
    return atomic_write_text(path, trace_csv(trace, run_config))
