from __future__ import annotations

import math
from collections import OrderedDict
from typing import Dict, List, Tuple

import torch
from torch import nn

from loggers.network_logger import network_logger as logger
from models.model_config import ModelConfig
from network.hs2s import HS2SNet

PARAMETER_GROUPS = (
    "encoder",
    "reference_encoder",
    "rnn",
    "merger",
    "initializer",
    "skip_rnn",
    "decoder",
    "aux_head",
)


def fan_in(conv: nn.Conv2d) -> int:
    return conv.in_channels // conv.groups * math.prod(conv.kernel_size)


def init_bound(conv: nn.Conv2d) -> float:
    return math.sqrt(6.0 / fan_in(conv))


@torch.no_grad()
def init_params(net: nn.Module, seed: int) -> nn.Module:
    """He-uniform kernels in +-sqrt(6 / fan_in), zero biases, drawn in module order from one seeded generator."""
    generator = torch.Generator().manual_seed(int(seed))
    for module in net.modules():
        if isinstance(module, nn.Conv2d):
            bound = init_bound(module)
            module.weight.uniform_(-bound, bound, generator=generator)
            if module.bias is not None:
                module.bias.zero_()
    return net


def build_model(config: ModelConfig, seed: int) -> HS2SNet:
    net = init_params(HS2SNet(config), seed)
    logger.info(f"initialised {config.variant.value} (seed={seed})")
    return net


def group_of(name: str) -> str:
    if name.startswith("decoder.skip_rnn."):
        return "skip_rnn"
    if name.startswith("decoder.aux_head."):
        return "aux_head"
    return name.split(".", 1)[0]


def parameter_groups(net: nn.Module) -> Dict[str, List[Tuple[str, nn.Parameter]]]:
    groups: Dict[str, List[Tuple[str, nn.Parameter]]] = OrderedDict()
    for name, param in net.named_parameters():
        groups.setdefault(group_of(name), []).append((name, param))
    return groups
