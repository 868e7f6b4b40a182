"""
Goal phase tracking with a per-channel Kalman filter.

Each channel carries an independent (S, A, F) state advanced by
``S += dt * F``. Network predictions are weighted by the deviation
between forward and goal-centric keyjoint predictions; matched motion
priors are fused only while the character is near its goal but the
active hand is not.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from django.core.exceptions import ValidationError

from src.apps.common.rotations import log_frobenius_norm, require_rotation, split_transform

from .constants import (
    HAND_KEYJOINTS,
    DeviationConfig,
    ErrorMessages,
    KalmanConfig,
    Keyjoint,
    MeasurementSource,
)
from .state import F, S, GoalEstimate, Measurement, PhaseState, require_psd, wrapped_difference


logger = logging.getLogger(__name__)


def transition(dt):
    """
    State transition over ``dt`` seconds in (S, A, F) order.
    """
    matrix = np.eye(3)
    matrix[S, F] = dt
    return matrix


def process_noise(variances=KalmanConfig.STATISTICAL_VARIANCE, fraction=KalmanConfig.PROCESS_FRACTION):
    return np.diag(fraction * np.asarray(variances, dtype=float))


def _normalized(values, like):
    return PhaseState.from_array(values, like.max_frequency)


def predict(goal, dt, variances=KalmanConfig.STATISTICAL_VARIANCE, fraction=KalmanConfig.PROCESS_FRACTION):
    """
    Propagate ``goal`` by ``dt`` seconds: the mean advances its phase by
    its frequency, the covariance becomes ``F P F^T + Q``.
    """
    if not dt > 0.0:
        raise ValidationError(ErrorMessages.BAD_DT)
    matrix = transition(dt)
    mean = goal.mean.as_array() @ matrix.T
    covariance = matrix @ goal.covariance @ matrix.T + process_noise(variances, fraction)
    return GoalEstimate(_normalized(mean, goal.mean), covariance, goal.notes)


def kalman_gain(covariance, noise, regularization=KalmanConfig.REGULARIZATION):
    """
    Gain ``P (P + R)^-1`` per channel and the channels whose innovation
    covariance had to be regularized.
    """
    innovation = np.asarray(covariance) + np.asarray(noise)
    singular = np.linalg.matrix_rank(innovation) < 3
    if singular.any():
        innovation = np.array(innovation)
        innovation[singular] += regularization * np.eye(3)
    gain = np.swapaxes(np.linalg.solve(innovation, np.swapaxes(covariance, -1, -2)), -1, -2)
    return gain, np.nonzero(singular)[0]


def innovation(goal, value):
    """
    Measurement minus mean, with the phase taken the short way round.
    """
    residual = value.as_array() - goal.mean.as_array()
    residual[:, S] = wrapped_difference(value.phase, goal.mean.phase)
    return residual


def update(goal, measurement, regularization=KalmanConfig.REGULARIZATION):
    """
    Fuse one measurement into ``goal``.

    The covariance uses the Joseph form ``(I-K) P (I-K)^T + K R K^T``,
    equal to ``(I-K) P`` for this gain, symmetrized.
    """
    require_psd(goal.covariance)
    noise = measurement.covariance
    gain, singular = kalman_gain(goal.covariance, noise, regularization)
    notes = goal.notes
    if len(singular):
        logger.info("Regularized singular innovation covariance on channels %s", singular.tolist())
        notes = notes + (f"regularized innovation covariance on channels {singular.tolist()}",)

    residual = innovation(goal, measurement.value)
    mean = goal.mean.as_array() + np.einsum("cij,cj->ci", gain, residual)

    complement = np.eye(3) - gain
    covariance = (
        complement @ goal.covariance @ np.swapaxes(complement, -1, -2)
        + gain @ noise @ np.swapaxes(gain, -1, -2)
    )
    covariance = 0.5 * (covariance + np.swapaxes(covariance, -1, -2))
    return GoalEstimate(_normalized(mean, goal.mean), covariance, notes)


def _transform(transforms, keyjoint):
    try:
        return np.asarray(transforms[keyjoint], dtype=float)
    except KeyError:
        raise ValidationError(ErrorMessages.MISSING_KEYJOINT.format(name=str(keyjoint))) from None


def pose_deviation(first, second, body_width=DeviationConfig.BODY_WIDTH,
                   rotation_weight=DeviationConfig.ROTATION_WEIGHT, keyjoints=tuple(Keyjoint)):
    """
    Sum over ``keyjoints`` of ``rotation_weight * ||log(R_1^T R_2)||_F``
    and ``||t_1 - t_2|| / body_width`` between two transform sets.
    """
    if not body_width > 0.0:
        raise ValidationError(ErrorMessages.BAD_BODY_WIDTH)
    total = 0.0
    for keyjoint in keyjoints:
        first_rotation, first_translation = split_transform(_transform(first, keyjoint))
        second_rotation, second_translation = split_transform(_transform(second, keyjoint))
        require_rotation(first_rotation, f"{keyjoint} rotation")
        require_rotation(second_rotation, f"{keyjoint} rotation")
        total += rotation_weight * log_frobenius_norm(first_rotation.T @ second_rotation)
        total += np.linalg.norm(first_translation - second_translation) / body_width
    return float(total)


def deviation(ego, inv, goals, body_width=DeviationConfig.BODY_WIDTH,
              rotation_weight=DeviationConfig.ROTATION_WEIGHT, literal=False):
    """
    Disagreement between forward keyjoint predictions ``ego`` and the
    goal-centric predictions ``inv`` composed into the world by their
    goal transforms, ``T = G @ T_inv``.

    Each keyjoint adds ``rotation_weight * ||log(R_ego^T R)||_F`` and
    ``||t_ego - t|| / body_width``. ``literal`` compares ``inv`` directly,
    without the goal composition.
    """
    composed = {}
    for keyjoint in Keyjoint:
        predicted = _transform(inv, keyjoint)
        require_rotation(split_transform(_transform(goals, keyjoint))[0], f"{keyjoint.label} goal rotation")
        require_rotation(predicted[:3, :3], f"{keyjoint.label} goal-centric rotation")
        composed[keyjoint] = predicted if literal else _transform(goals, keyjoint) @ predicted
    return pose_deviation(ego, composed, body_width, rotation_weight)


def is_nearby(position, goal, radius=KalmanConfig.NEARBY_RADIUS):
    return bool(np.linalg.norm(np.asarray(position) - np.asarray(goal)) < radius)


@dataclass(frozen=True)
class GoalEvent:
    """
    A keyframe goal: from ``time`` on, ``measurement`` is the matched
    phase prior for the task of ``hand``.
    """
    time: float
    measurement: Measurement
    hand: str = "right"
    keyframe: str = ""


@dataclass(frozen=True)
class PredictedSample:
    """
    What the body network reports for one step: its goal-phase output and
    the forward, goal-centric and goal keyjoint transforms.
    """
    measurement: PhaseState
    ego: dict
    inv: dict
    goals: dict


def matched_is_gated(sample, hand, radius=KalmanConfig.NEARBY_RADIUS):
    """
    True when the ground-projected root is near its goal while the active
    hand is not near its own.
    """
    root = _transform(sample.ego, Keyjoint.HIP)[:2, 3]
    root_goal = _transform(sample.goals, Keyjoint.HIP)[:2, 3]
    keyjoint = HAND_KEYJOINTS[str(hand)]
    hand_position = _transform(sample.ego, keyjoint)[:3, 3]
    hand_goal = _transform(sample.goals, keyjoint)[:3, 3]
    return is_nearby(root, root_goal, radius) and not is_nearby(hand_position, hand_goal, radius)


@dataclass(frozen=True)
class PhaseTrace:
    """
    Estimates at every tracked step (index 0 is the initial estimate) with
    the diagonal of the predicted-measurement gain and the deviation used.
    """
    times: np.ndarray
    estimates: tuple
    gains: np.ndarray
    deviations: np.ndarray
    matched: np.ndarray
    truncated: bool = False
    failure: str = None
    notes: tuple = field(default=())

    def __len__(self):
        return len(self.estimates)

    @property
    def final(self):
        return self.estimates[-1]

    def component(self, index):
        """
        ``(steps, channels)`` history of one mean component.
        """
        return np.array([estimate.mean.as_array()[:, index] for estimate in self.estimates])


def _latest_event(events, time):
    latest = None
    for event in events:
        if event.time <= time + 1e-12:
            latest = event
    return latest


def track(events, source, horizon, dt, initial=None, variances=KalmanConfig.STATISTICAL_VARIANCE,
          fraction=KalmanConfig.PROCESS_FRACTION, nearby_radius=KalmanConfig.NEARBY_RADIUS,
          body_width=DeviationConfig.BODY_WIDTH, use_predicted=True, use_matched=True, literal=False):
    """
    Track the goal phase from the first event for ``horizon`` seconds.

    Every step predicts, asks ``source(step, time, predicted)`` for a
    ``PredictedSample``, fuses its measurement with noise ``c * Q`` where
    ``c`` is the keyjoint deviation, then fuses the value of the latest
    matched event with noise ``Q`` when ``matched_is_gated``. The event
    covariance only seeds the initial estimate. A failing source
    truncates the trace at the last good step.
    """
    if not dt > 0.0:
        raise ValidationError(ErrorMessages.BAD_DT)
    if not horizon > 0.0:
        raise ValidationError(ErrorMessages.BAD_HORIZON)
    events = sorted(events, key=lambda event: event.time)
    if not events:
        raise ValidationError(ErrorMessages.NO_EVENTS)

    start = events[0].time
    estimate = initial or GoalEstimate(events[0].measurement.value, events[0].measurement.covariance)
    channels = len(estimate.mean)
    noise = process_noise(variances, fraction)

    times, estimates = [start], [estimate]
    gains, deviations, matched = [np.full((channels, 3), np.nan)], [np.nan], [False]
    failure = None
    steps = int(round(horizon / dt))

    for step in range(1, steps + 1):
        time = start + step * dt
        predicted = predict(estimate, dt, variances, fraction)
        try:
            sample = source(step, time, predicted)
            confidence = deviation(sample.ego, sample.inv, sample.goals, body_width, literal=literal)
        except Exception as error:
            failure = f"step {step}: {error}"
            logger.warning("Goal tracking truncated at step %d: %s", step, error)
            break

        estimate = predicted
        gain_diagonal = np.full((channels, 3), np.nan)
        if use_predicted:
            measurement = Measurement(sample.measurement, confidence * noise, MeasurementSource.PREDICTED)
            gain, _ = kalman_gain(estimate.covariance, measurement.covariance)
            gain_diagonal = np.diagonal(gain, axis1=1, axis2=2).copy()
            estimate = update(estimate, measurement)

        event = _latest_event(events, time)
        fused_match = bool(use_matched and event is not None and matched_is_gated(sample, event.hand, nearby_radius))
        if fused_match:
            estimate = update(estimate, Measurement(event.measurement.value, noise, MeasurementSource.MATCHED))

        times.append(time)
        estimates.append(estimate)
        gains.append(gain_diagonal)
        deviations.append(confidence)
        matched.append(fused_match)

    logger.debug("Tracked %d steps, final covariance trace %.3g", len(estimates) - 1, float(estimate.trace.sum()))
    return PhaseTrace(
        np.array(times),
        tuple(estimates),
        np.array(gains),
        np.array(deviations),
        np.array(matched),
        failure is not None,
        failure,
        estimate.notes,
    )
