"""
Recurrent and large-kernel building blocks.

The functional forms take explicit weights so that scalar oracles and
double-precision gradient checks can drive them directly; the modules own the
parameters and delegate to them.
"""
from __future__ import annotations

from typing import NamedTuple, Optional

import torch
import torch.nn.functional as F
from torch import nn

from exceptions import ShapeMismatchError
from models.enums import StateActivation


class RNNState(NamedTuple):
    h: torch.Tensor
    c: torch.Tensor

    @classmethod
    def zeros(cls, like: torch.Tensor, channels: int) -> "RNNState":
        B, _, H, W = like.shape
        zeros = like.new_zeros((B, channels, H, W))
        return cls(h=zeros, c=zeros.clone())


def convlstm_step(
    x: torch.Tensor,
    state: RNNState,
    weight: torch.Tensor,
    bias: Optional[torch.Tensor] = None,
    activation: StateActivation = StateActivation.RELU_BOTH,
) -> RNNState:
    """
    One ConvLSTM update.

        i, f, o = sigmoid(conv([x; h]))
        g       = relu(conv([x; h]))
        c'      = f * c + i * g
        h'      = o * relu(c')

    `weight` is [4 * hidden, in + hidden, k, k] with gate blocks ordered i, f, o, g.
    `activation` switches either ReLU site back to tanh.
    """
    if x.shape[0] != state.h.shape[0] or x.shape[2:] != state.h.shape[2:]:
        raise ShapeMismatchError(f"input {tuple(x.shape)} and state {tuple(state.h.shape)} disagree")
    if state.h.shape != state.c.shape:
        raise ShapeMismatchError(f"h {tuple(state.h.shape)} and c {tuple(state.c.shape)} disagree")

    k = weight.shape[-1]
    gates = F.conv2d(torch.cat([x, state.h], dim=1), weight, bias, padding=k // 2)
    i, f, o, g = gates.chunk(4, dim=1)
    i, f, o = torch.sigmoid(i), torch.sigmoid(f), torch.sigmoid(o)
    g = torch.tanh(g) if activation is StateActivation.RELU_OUTPUT else F.relu(g)
    c = f * state.c + i * g
    squash = torch.tanh if activation is StateActivation.RELU_CANDIDATE else F.relu
    return RNNState(h=o * squash(c), c=c)


class ConvLSTMCell(nn.Module):
    def __init__(
        self,
        in_channels: int,
        hidden_channels: int,
        kernel_size: int = 3,
        activation: StateActivation = StateActivation.RELU_BOTH,
    ) -> None:
        super().__init__()
        self.hidden_channels = hidden_channels
        self.activation = StateActivation(activation)
        self.gates = nn.Conv2d(
            in_channels + hidden_channels, 4 * hidden_channels, kernel_size, padding=kernel_size // 2
        )

    def initial_state(self, like: torch.Tensor) -> RNNState:
        return RNNState.zeros(like, self.hidden_channels)

    def forward(self, x: torch.Tensor, state: Optional[RNNState] = None) -> RNNState:
        if state is None:
            state = self.initial_state(x)
        return convlstm_step(x, state, self.gates.weight, self.gates.bias, self.activation)


class GCWeights(NamedTuple):
    """Kernels of the two separable paths, path A = (k x 1, 1 x k), path B = (1 x k, k x 1)."""

    a_kx1: torch.Tensor
    a_1xk: torch.Tensor
    b_1xk: torch.Tensor
    b_kx1: torch.Tensor
    a_kx1_bias: Optional[torch.Tensor] = None
    a_1xk_bias: Optional[torch.Tensor] = None
    b_1xk_bias: Optional[torch.Tensor] = None
    b_kx1_bias: Optional[torch.Tensor] = None


def global_conv(x: torch.Tensor, w: GCWeights) -> torch.Tensor:
    k = w.a_kx1.shape[-2]
    if k % 2 == 0:
        raise ShapeMismatchError(f"global convolution needs an odd kernel, got {k}")
    pad_v, pad_h = (k // 2, 0), (0, k // 2)
    path_a = F.conv2d(F.conv2d(x, w.a_kx1, w.a_kx1_bias, padding=pad_v), w.a_1xk, w.a_1xk_bias, padding=pad_h)
    path_b = F.conv2d(F.conv2d(x, w.b_1xk, w.b_1xk_bias, padding=pad_h), w.b_kx1, w.b_kx1_bias, padding=pad_v)
    return path_a + path_b


class GlobalConv(nn.Module):
    def __init__(self, in_channels: int, out_channels: int, kernel_size: int = 7) -> None:
        super().__init__()
        k = kernel_size
        self.a_kx1 = nn.Conv2d(in_channels, out_channels, (k, 1), padding=(k // 2, 0))
        self.a_1xk = nn.Conv2d(out_channels, out_channels, (1, k), padding=(0, k // 2))
        self.b_1xk = nn.Conv2d(in_channels, out_channels, (1, k), padding=(0, k // 2))
        self.b_kx1 = nn.Conv2d(out_channels, out_channels, (k, 1), padding=(k // 2, 0))

    def weights(self) -> GCWeights:
        return GCWeights(
            self.a_kx1.weight,
            self.a_1xk.weight,
            self.b_1xk.weight,
            self.b_kx1.weight,
            self.a_kx1.bias,
            self.a_1xk.bias,
            self.b_1xk.bias,
            self.b_kx1.bias,
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return global_conv(x, self.weights())
