"""Runtime latent optimization against partial observations, and decoding."""

import logging
from dataclasses import dataclass, field

import numpy as np
import torch

from src.apps.common.exceptions import InferenceFailure
from src.apps.eikonal.constants import FieldConfig
from src.apps.eikonal.fields import FieldTriple, build_obstacle_field, build_target_field, object_centric_geometry
from src.apps.scene.constants import GridConfig
from src.apps.scene.solids import unsigned_distance
from src.apps.scene.voxels import occupancy_mask

from .cases import default_condition, denormalize_targets, normalize_points, normalize_targets
from .constants import ErrorMessages, InferenceConfig, TrainingConfig
from .network import as_tensor, check_latent


logger = logging.getLogger(__name__)


@dataclass
class LatentFit:
    latent: np.ndarray
    history: list = field(default_factory=list)
    prior_count: int = 0

    @property
    def final_loss(self):
        return self.history[-1] if self.history else float("nan")


@dataclass
class Observations:
    """
    Normalized network inputs of one inference problem: the grid cells
    with their observed ``(D_t, D_o)`` and the prior set with its
    ``D_toa`` targets.
    """
    points: torch.Tensor
    distances: torch.Tensor
    prior_points: torch.Tensor
    prior_toa: torch.Tensor
    condition: torch.Tensor
    obstacle_count: int = 0
    target_count: int = 0

    def __len__(self):
        return self.points.shape[0]


def target_prior_samples(scene, prior, radius=InferenceConfig.PRIOR_RADIUS, epsilon_t=FieldConfig.EPSILON_T):
    """
    Prior positions closer than ``radius`` to the target, each with the
    inverted time left until (or since) the contact frame.
    """
    positions = np.asarray(prior.positions, dtype=float)
    close = unsigned_distance(positions, [scene.target]) < radius
    remaining = np.abs(prior.times[prior.contact_index] - prior.times)
    toa = 1.0 / np.maximum(remaining, epsilon_t)
    return positions[close], toa[close]


def collect_observations(scene, prior, condition, geometry, radius=InferenceConfig.PRIOR_RADIUS):
    d_t = build_target_field(scene, geometry)
    d_o = build_obstacle_field(scene, geometry)
    centers = geometry.cell_centers()

    target_points, target_toa = target_prior_samples(scene, prior, radius)
    if len(target_points) == 0:
        raise InferenceFailure(ErrorMessages.NO_TARGET_SAMPLES.format(radius=radius))
    obstacle_points = centers[occupancy_mask(scene.obstacles, geometry)].reshape(-1, 3)

    prior_points = np.concatenate([obstacle_points, target_points])
    prior_toa = np.concatenate([np.zeros(len(obstacle_points)), target_toa])
    observed = np.stack([d_t.values.reshape(-1), d_o.values.reshape(-1), np.zeros(geometry.size)], axis=1)
    scale = normalize_targets(np.ones(3))
    return Observations(
        as_tensor(normalize_points(centers.reshape(-1, 3), geometry)),
        as_tensor(normalize_targets(observed)[:, :2]),
        as_tensor(normalize_points(prior_points, geometry)),
        as_tensor(prior_toa * scale[2]),
        as_tensor(condition.encode()),
        len(obstacle_points),
        len(target_points),
    )


def inference_loss(decoder, latent, observations, rows=slice(None), latent_sigma=TrainingConfig.LATENT_SIGMA):
    """
    Mean L1 error on the observed distance fields, plus the mean squared
    ``D_toa`` error over the prior set, plus the latent prior scaled to one
    grid sample. Weighting the prior set by its mean is the ``N(E)/N(prior)``
    rebalancing of the summed form.
    """
    predicted = decoder(observations.points[rows], latent, observations.condition)
    distance_error = (predicted[:, :2] - observations.distances[rows]).abs().sum(dim=1).mean()
    prior_predicted = decoder(observations.prior_points, latent, observations.condition)
    toa_error = (prior_predicted[:, 2] - observations.prior_toa).pow(2).mean()
    regularizer = latent.pow(2).sum() / (latent_sigma ** 2 * len(observations))
    return distance_error + toa_error + regularizer


def infer_latent(decoder, scene, prior, condition=None, steps=InferenceConfig.STEPS, lr=InferenceConfig.LEARNING_RATE,
                 seed=0, prior_radius=InferenceConfig.PRIOR_RADIUS, latent_sigma=TrainingConfig.LATENT_SIGMA,
                 batch_size=TrainingConfig.BATCH_SIZE, h=GridConfig.SPACING, cube=GridConfig.CUBE_SIZE):
    """
    Optimize a fresh latent code for ``scene`` with the decoder frozen.

    The observed distance fields come from the scene itself; ``D_toa`` is
    only constrained on the obstacle interiors (target 0) and on the prior
    samples within ``prior_radius`` of the target. Raises
    ``InferenceFailure`` when the prior never comes that close.
    """
    condition = condition or default_condition(scene)
    geometry = object_centric_geometry(scene, h, cube)
    observations = collect_observations(scene, prior, condition, geometry, prior_radius)
    logger.debug(
        "Inference on %d cells, %d obstacle and %d target prior samples",
        len(observations), observations.obstacle_count, observations.target_count,
    )

    decoder.eval()
    for parameter in decoder.parameters():
        parameter.requires_grad_(False)
    generator = torch.Generator().manual_seed(seed)
    latent = torch.normal(0.0, TrainingConfig.LATENT_INIT_STD, (decoder.latent_size,), generator=generator)
    latent.requires_grad_()
    optimizer = torch.optim.Adam([latent], lr=lr)

    history = []
    try:
        for _ in range(int(steps)):
            rows = slice(None)
            if len(observations) > batch_size:
                rows = torch.randperm(len(observations), generator=generator)[:batch_size]
            optimizer.zero_grad()
            loss = inference_loss(decoder, latent, observations, rows, latent_sigma)
            if not torch.isfinite(loss):
                raise InferenceFailure(f"Inference loss became non-finite after {len(history)} steps.")
            loss.backward()
            optimizer.step()
            history.append(float(loss.detach()))
    finally:
        for parameter in decoder.parameters():
            parameter.requires_grad_(True)

    logger.info("Latent inference finished after %d steps, loss %.6f", len(history), history[-1] if history else 0.0)
    return LatentFit(latent.detach().numpy().astype(float), history, observations.target_count)


def decode_field(decoder, latent, condition, geometry, batch_size=InferenceConfig.DECODE_BATCH):
    """
    Evaluate the decoder on every cell center of ``geometry`` and return
    the de-normalized fields.
    """
    latent = as_tensor(check_latent(latent, decoder.latent_size))
    code = as_tensor(condition.encode())
    points = normalize_points(geometry.cell_centers().reshape(-1, 3), geometry)
    outputs = []
    decoder.eval()
    with torch.no_grad():
        for start in range(0, len(points), batch_size):
            chunk = as_tensor(points[start:start + batch_size])
            outputs.append(decoder(chunk, latent, code).numpy())
    values = denormalize_targets(np.concatenate(outputs)).reshape(geometry.dims + (3,))
    return FieldTriple.from_stacked(geometry, values)
