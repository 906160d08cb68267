from enum import Enum


class Variant(str, Enum):
    S2S_BASELINE = "S2S_BASELINE"
    HS2S_REF0_ONLY = "HS2S_REF0_ONLY"
    HS2S_PREV_ONLY = "HS2S_PREV_ONLY"
    HS2S_FULL = "HS2S_FULL"
    HS2S_COSINE = "HS2S_COSINE"

    @property
    def uses_first_frame(self) -> bool:
        return self in (Variant.HS2S_REF0_ONLY, Variant.HS2S_FULL, Variant.HS2S_COSINE)

    @property
    def uses_previous_frame(self) -> bool:
        return self in (Variant.HS2S_PREV_ONLY, Variant.HS2S_FULL, Variant.HS2S_COSINE)


class ShapeKind(str, Enum):
    SQUARE = "square"
    CIRCLE = "circle"
    TRIANGLE = "triangle"


class StateActivation(str, Enum):
    # which of the two LSTM state nonlinearities use ReLU; the other keeps tanh
    RELU_BOTH = "RELU_BOTH"
    RELU_CANDIDATE = "RELU_CANDIDATE"
    RELU_OUTPUT = "RELU_OUTPUT"


class BetaScope(str, Enum):
    BATCH = "batch"
    FRAME = "frame"
