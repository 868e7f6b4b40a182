"""The latent-conditioned field decoder network."""

import copy

import numpy as np
import torch
import torch.nn.functional as functional
from django.core.exceptions import ValidationError
from torch import nn

from .constants import DecoderConfig, ErrorMessages, GradientCheckConfig


class FieldDecoder(nn.Module):
    """
    Maps a point, a scene latent code and a condition vector to the three
    normalized field values.

    The input ``concat(x, z, c)`` passes through ``layers`` fully connected
    layers with rectifier activations; layer ``skip_layer`` receives the
    input again next to the hidden features. A softplus head keeps every
    output non-negative.
    """

    def __init__(self, latent_size=DecoderConfig.LATENT_SIZE, condition_size=DecoderConfig.CONDITION_SIZE,
                 hidden_size=DecoderConfig.HIDDEN_SIZE, layers=DecoderConfig.LAYERS,
                 skip_layer=DecoderConfig.SKIP_LAYER):
        super().__init__()
        if not 0 < skip_layer < layers:
            raise ValidationError(ErrorMessages.BAD_SKIP)
        self.latent_size = latent_size
        self.condition_size = condition_size
        self.hidden_size = hidden_size
        self.skip_layer = skip_layer
        self.input_size = DecoderConfig.POINT_SIZE + latent_size + condition_size

        self.layers = nn.ModuleList()
        for index in range(layers):
            in_features = self.input_size if index == 0 else hidden_size
            if index == skip_layer:
                in_features += self.input_size
            out_features = DecoderConfig.OUTPUT_SIZE if index == layers - 1 else hidden_size
            self.layers.append(nn.Linear(in_features, out_features))
        self.activation = nn.ReLU()
        self.head = nn.Softplus()

    def architecture(self):
        return {
            "latent_size": self.latent_size,
            "condition_size": self.condition_size,
            "hidden_size": self.hidden_size,
            "layers": len(self.layers),
            "skip_layer": self.skip_layer,
        }

    def layer_activation(self, index):
        return self.head if index == len(self.layers) - 1 else self.activation

    def forward(self, points, latent, condition):
        count = points.shape[0]
        if latent.dim() == 1:
            latent = latent.unsqueeze(0).expand(count, -1)
        if condition.dim() == 1:
            condition = condition.unsqueeze(0).expand(count, -1)
        inputs = torch.cat([points, latent, condition], dim=-1)
        hidden = inputs
        for index, layer in enumerate(self.layers):
            if index == self.skip_layer:
                hidden = torch.cat([hidden, inputs], dim=-1)
            hidden = self.layer_activation(index)(layer(hidden))
        return hidden


def as_tensor(values, dtype=torch.float32):
    return torch.as_tensor(np.asarray(values), dtype=dtype)


def check_latent(latent, size=DecoderConfig.LATENT_SIZE):
    """
    The latent code as a finite float vector of ``size`` entries.
    """
    latent = np.asarray(latent, dtype=float).reshape(-1)
    if latent.size != size:
        raise ValidationError(ErrorMessages.LATENT_SIZE.format(size=size, found=latent.size))
    if not np.all(np.isfinite(latent)):
        raise ValidationError(ErrorMessages.NON_FINITE_LATENT)
    return latent


def gradient_check_layers(decoder=None, samples=GradientCheckConfig.SAMPLES, seed=0,
                          eps=GradientCheckConfig.EPSILON, atol=GradientCheckConfig.ABSOLUTE_TOLERANCE,
                          rtol=GradientCheckConfig.RELATIVE_TOLERANCE):
    """
    Compare the backward pass of every layer of ``decoder`` (its weights,
    bias and input) and of the whole network (its inputs) against central
    differences in float64. Returns ``{name: passed}``.

    Checks run on a copy; pass a narrow decoder to keep them quick.
    """
    if decoder is None:
        decoder = FieldDecoder(latent_size=5, condition_size=DecoderConfig.CONDITION_SIZE, hidden_size=7)
    model = copy.deepcopy(decoder).double()
    generator = torch.Generator().manual_seed(seed)

    def random(*shape):
        return torch.randn(*shape, dtype=torch.float64, generator=generator).requires_grad_()

    results = {}
    for index, layer in enumerate(model.layers):
        activation = model.layer_activation(index)
        inputs = random(samples, layer.in_features)
        weight = layer.weight.detach().clone().requires_grad_()
        bias = layer.bias.detach().clone().requires_grad_()
        results[f"layer{index}"] = torch.autograd.gradcheck(
            lambda x, w, b, act=activation: act(functional.linear(x, w, b)),
            (inputs, weight, bias),
            eps=eps,
            atol=atol,
            rtol=rtol,
            raise_exception=False,
        )

    inputs = (
        random(samples, DecoderConfig.POINT_SIZE),
        random(samples, model.latent_size),
        random(samples, model.condition_size),
    )
    results["network"] = torch.autograd.gradcheck(
        model, inputs, eps=eps, atol=atol, rtol=rtol, raise_exception=False,
    )
    return results
