import os
import tempfile

# loggers open their files on import
os.environ.setdefault("HS2S_LOG_DIR", tempfile.mkdtemp(prefix="hs2s-test-logs-"))

import numpy as np  # noqa: E402
import pytest  # noqa: E402
import torch  # noqa: E402

from models.model_config import ModelConfig  # noqa: E402
from models.synth_config import SynthConfig  # noqa: E402
from models.train_config import TrainConfig  # noqa: E402
from synthdata.generator import generate_sequence  # noqa: E402


@pytest.fixture
def tiny_model_config():
    return ModelConfig(
        in_H=32,
        in_W=32,
        base_channels=2,
        bottleneck_channels=4,
        gc_kernel=3,
        decoder_channels=(8, 4, 4, 4, 4),
    )


@pytest.fixture
def tiny_synth_config():
    return SynthConfig(H=32, W=32, T=4, n_distractors=1, object_size=8, motion_speed=1.5, seed=5)


@pytest.fixture
def tiny_pair(tiny_synth_config):
    return generate_sequence(tiny_synth_config, seq_id="tiny")


@pytest.fixture
def tiny_dataset():
    return [
        generate_sequence(SynthConfig(H=32, W=32, T=6, object_size=8, seed=s), seq_id=f"seq{s:04d}")
        for s in range(2)
    ]


@pytest.fixture
def tiny_train_config():
    return TrainConfig(
        lr=1e-3,
        batch_size=2,
        max_steps=3,
        snippet_min=3,
        snippet_max=4,
        decay_steps=4,
        checkpoint_every=2,
        log_every=1,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(autouse=True)
def _single_thread_torch():
    threads = torch.get_num_threads()
    torch.set_num_threads(1)
    yield
    torch.set_num_threads(threads)
