"""Phase states, their 2D embedding and Gaussian goal estimates."""

from dataclasses import dataclass, field

import numpy as np
from django.core.exceptions import ValidationError

from .constants import ErrorMessages, KalmanConfig, MeasurementSource, PhaseConfig


# Component order of every per-channel vector and covariance.
S, A, F = 0, 1, 2


def wrap_phase(values):
    """
    Phase values wrapped into [0, 1).
    """
    wrapped = np.mod(np.asarray(values, dtype=float), 1.0)
    return np.where(wrapped >= 1.0, 0.0, wrapped)


def wrapped_difference(a, b):
    """
    Signed circular difference ``a - b`` in (-0.5, 0.5].
    """
    delta = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    return delta - np.ceil(delta - 0.5)


@dataclass(frozen=True)
class PhaseState:
    """
    Per-channel phase ``S`` (cyclic), amplitude ``A`` and frequency ``F``
    in Hz. Values are normalized on construction: S wrapped into [0, 1),
    A clamped into [0, 1], F clamped into [0, max_frequency].
    """
    phase: np.ndarray
    amplitude: np.ndarray
    frequency: np.ndarray
    max_frequency: float = PhaseConfig.MAX_FREQUENCY

    def __post_init__(self):
        phase = np.atleast_1d(np.asarray(self.phase, dtype=float))
        amplitude = np.atleast_1d(np.asarray(self.amplitude, dtype=float))
        frequency = np.atleast_1d(np.asarray(self.frequency, dtype=float))
        if not (phase.shape == amplitude.shape == frequency.shape) or phase.ndim != 1:
            raise ValidationError(ErrorMessages.CHANNEL_MISMATCH)
        object.__setattr__(self, "phase", wrap_phase(phase))
        object.__setattr__(self, "amplitude", np.clip(amplitude, 0.0, 1.0))
        object.__setattr__(self, "frequency", np.clip(frequency, 0.0, self.max_frequency))

    def __len__(self):
        return len(self.phase)

    @classmethod
    def zeros(cls, channels=PhaseConfig.CHANNELS):
        return cls(np.zeros(channels), np.zeros(channels), np.zeros(channels))

    @classmethod
    def from_array(cls, values, max_frequency=PhaseConfig.MAX_FREQUENCY):
        values = np.asarray(values, dtype=float)
        return cls(values[:, S], values[:, A], values[:, F], max_frequency)

    def as_array(self):
        """
        ``(channels, 3)`` array in (S, A, F) order.
        """
        return np.column_stack([self.phase, self.amplitude, self.frequency])

    def to_dict(self):
        return {
            "S": self.phase.tolist(),
            "A": self.amplitude.tolist(),
            "F": self.frequency.tolist(),
        }

    @classmethod
    def from_dict(cls, data):
        return cls(data["S"], data["A"], data["F"])


@dataclass(frozen=True)
class PhaseVector:
    """
    Goal-phase features: one ``(A cos 2piS, A sin 2piS)`` pair and the
    frequency per channel.
    """
    pairs: np.ndarray
    frequency: np.ndarray

    @classmethod
    def embed(cls, state):
        angle = 2.0 * np.pi * state.phase
        pairs = np.column_stack([state.amplitude * np.cos(angle), state.amplitude * np.sin(angle)])
        return cls(pairs, np.array(state.frequency))

    @property
    def amplitudes(self):
        return np.linalg.norm(self.pairs, axis=1)

    def to_state(self):
        phase = np.arctan2(self.pairs[:, 1], self.pairs[:, 0]) / (2.0 * np.pi)
        return PhaseState(phase, self.amplitudes, self.frequency)


def channel_covariance(covariance, channels):
    """
    Broadcast a 3x3 covariance (or validate a per-channel stack) to
    ``(channels, 3, 3)``.
    """
    covariance = np.asarray(covariance, dtype=float)
    if covariance.shape == (3, 3):
        covariance = np.broadcast_to(covariance, (channels, 3, 3))
    if covariance.shape != (channels, 3, 3):
        raise ValidationError(ErrorMessages.BAD_COVARIANCE_SHAPE)
    return np.array(covariance)


def is_psd(covariance, floor=KalmanConfig.PSD_FLOOR):
    covariance = np.asarray(covariance, dtype=float)
    if not np.all(np.isfinite(covariance)):
        return False
    if not np.allclose(covariance, np.swapaxes(covariance, -1, -2), atol=1e-9):
        return False
    return bool(np.all(np.linalg.eigvalsh(covariance) >= floor))


def require_psd(covariance):
    if not is_psd(covariance):
        raise ValidationError(ErrorMessages.NOT_PSD)
    return covariance


@dataclass(frozen=True)
class GoalEstimate:
    """
    Gaussian belief over the goal phase: a mean state and one 3x3
    covariance per channel, both in (S, A, F) order.
    """
    mean: PhaseState
    covariance: np.ndarray
    notes: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "covariance", channel_covariance(self.covariance, len(self.mean)))

    @classmethod
    def initial(cls, mean, covariance=None):
        covariance = np.zeros((3, 3)) if covariance is None else covariance
        return cls(mean, covariance)

    @property
    def trace(self):
        return np.trace(self.covariance, axis1=1, axis2=2)


@dataclass(frozen=True)
class Measurement:
    value: PhaseState
    covariance: np.ndarray
    source: str = MeasurementSource.PREDICTED

    def __post_init__(self):
        covariance = channel_covariance(self.covariance, len(self.value))
        object.__setattr__(self, "covariance", require_psd(covariance))
