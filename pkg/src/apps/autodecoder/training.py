"""Joint training of the decoder and the per-case latent codes."""

import logging
from dataclasses import dataclass, field

import torch
from django.core.exceptions import ValidationError

from src.apps.common.exceptions import TrainingFailure

from .constants import DecoderConfig, ErrorMessages, TrainingConfig
from .network import FieldDecoder, as_tensor


logger = logging.getLogger(__name__)


def reconstruction_loss(predicted, targets):
    """
    Per-sample mean of the L1 errors on D_t and D_o and the squared error
    on D_toa.
    """
    errors = torch.stack([
        (predicted[:, 0] - targets[:, 0]).abs(),
        (predicted[:, 1] - targets[:, 1]).abs(),
        (predicted[:, 2] - targets[:, 2]).pow(2),
    ], dim=1)
    return errors.sum(dim=1).mean()


def latent_prior(latent, sigma, samples):
    """
    ``||z||^2 / sigma^2`` scaled to one sample of a case with ``samples``
    samples, matching the per-sample reconstruction mean.
    """
    return latent.pow(2).sum() / (sigma ** 2 * samples)


@dataclass
class CaseTensors:
    points: torch.Tensor
    targets: torch.Tensor
    condition: torch.Tensor

    @classmethod
    def from_case(cls, case):
        points, targets, condition = case.network_inputs()
        return cls(as_tensor(points), as_tensor(targets), as_tensor(condition))

    def __len__(self):
        return self.points.shape[0]


def training_objective(decoder, latents, tensors, latent_sigma=TrainingConfig.LATENT_SIGMA,
                       batches=None):
    """
    Sum over cases of the reconstruction loss and the latent prior, and
    the mean reconstruction loss. ``batches`` optionally restricts each
    case to a subset of its sample indices.
    """
    total = 0.0
    reconstruction = 0.0
    for index, case in enumerate(tensors):
        rows = slice(None) if batches is None else batches[index]
        predicted = decoder(case.points[rows], latents[index], case.condition)
        loss = reconstruction_loss(predicted, case.targets[rows])
        total = total + loss + latent_prior(latents[index], latent_sigma, len(case))
        reconstruction = reconstruction + loss.detach()
    return total, float(reconstruction) / len(tensors)


@dataclass
class TrainingResult:
    decoder: FieldDecoder
    latents: dict
    history: list = field(default_factory=list)

    def latent(self, scene_id):
        return self.latents[str(scene_id)]


def _validate(cases, epochs, lr, latent_sigma):
    if len(cases) < TrainingConfig.MIN_CASES:
        raise ValidationError(ErrorMessages.NO_CASES.format(count=TrainingConfig.MIN_CASES))
    if int(epochs) < 1:
        raise ValidationError(ErrorMessages.BAD_EPOCHS)
    if not lr > 0.0:
        raise ValidationError(ErrorMessages.BAD_RATE)
    if not latent_sigma > 0.0:
        raise ValidationError(ErrorMessages.BAD_SIGMA)


def train(cases, epochs=TrainingConfig.EPOCHS, lr=TrainingConfig.LEARNING_RATE,
          latent_sigma=TrainingConfig.LATENT_SIGMA, batch_size=TrainingConfig.BATCH_SIZE,
          seed=TrainingConfig.SEED, decoder=None, latent_size=DecoderConfig.LATENT_SIZE):
    """
    Fit the decoder and one latent code per case by maximum a posteriori
    descent with Adam: one step per epoch over every case, each case
    contributing up to ``batch_size`` random samples.

    Latents start from ``N(0, 0.01^2)``. Cases sharing a scene id are keyed
    ``id#2``, ``id#3`` and so on. Raises ``TrainingFailure`` with the epoch
    index when the loss stops being finite.
    """
    _validate(cases, epochs, lr, latent_sigma)
    torch.manual_seed(seed)
    generator = torch.Generator().manual_seed(seed)
    decoder = decoder if decoder is not None else FieldDecoder(latent_size=latent_size)
    decoder.train()

    latents = torch.nn.Parameter(
        torch.normal(0.0, TrainingConfig.LATENT_INIT_STD, (len(cases), decoder.latent_size), generator=generator)
    )
    tensors = [CaseTensors.from_case(case) for case in cases]
    optimizer = torch.optim.Adam([
        {"params": decoder.parameters()},
        {"params": [latents]},
    ], lr=lr)

    history = []
    for epoch in range(int(epochs)):
        batches = [
            torch.randperm(len(case), generator=generator)[:batch_size] if len(case) > batch_size else slice(None)
            for case in tensors
        ]
        optimizer.zero_grad()
        total, reconstruction = training_objective(decoder, latents, tensors, latent_sigma, batches)
        if not torch.isfinite(total):
            raise TrainingFailure(ErrorMessages.NON_FINITE_LOSS.format(epoch=epoch), epoch=epoch)
        total.backward()
        optimizer.step()
        history.append({"epoch": epoch, "loss": float(total.detach()), "reconstruction": reconstruction})
        if epoch % TrainingConfig.LOG_EVERY == 0 or epoch == epochs - 1:
            logger.debug("Epoch %d: loss %.6f, reconstruction %.6f", epoch, float(total.detach()), reconstruction)

    decoder.eval()
    codes = {}
    for case, latent in zip(cases, latents.detach().numpy().astype(float)):
        key = case.scene_id
        suffix = 1
        while key in codes:
            suffix += 1
            key = f"{case.scene_id}#{suffix}"
        codes[key] = latent
    logger.info("Trained on %d cases for %d epochs, final reconstruction %.6f",
                len(cases), len(history), history[-1]["reconstruction"])
    return TrainingResult(decoder, codes, history)
