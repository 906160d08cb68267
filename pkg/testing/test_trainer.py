from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest
import torch

from configuration import Configuration as Config
from exceptions import ConfigurationError, DatasetValidationError, NonFiniteLossError
from models.loss_config import LossConfig
from models.synth_config import AugConfig
from models.train_config import ScheduleState
from network.params import build_model
from training import trainer
from training.checkpoint import load_checkpoint
from training.metrics_log import read_metrics_log
from training.schedule import initial_schedule


def _params(net):
    return {k: v.detach().clone() for k, v in net.state_dict().items()}


def _batch(dataset, train_config, step=0):
    return trainer.assemble_batch(dataset, step, train_config, AugConfig.identity(), LossConfig())


def test_prepared_snippets_are_consistent(tiny_dataset, tiny_train_config):
    batch = _batch(tiny_dataset, tiny_train_config)
    assert len(batch) == tiny_train_config.batch_size
    for snippet in batch:
        L = snippet.frames.shape[0]
        assert 3 <= L <= 4
        assert snippet.masks.shape == (L, 1, 32, 32)
        assert snippet.targets.classes.shape == (L - 1, 32, 32)
        assert snippet.masks[0].any()


def test_batches_depend_only_on_seed_and_step(tiny_dataset, tiny_train_config):
    a = _batch(tiny_dataset, tiny_train_config, step=5)
    b = _batch(tiny_dataset, tiny_train_config, step=5)
    assert [s.seq_id for s in a] == [s.seq_id for s in b]
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x.frames, y.frames)


def test_zero_learning_rate_leaves_parameters(tiny_dataset, tiny_train_config, tiny_model_config):
    config = replace(tiny_train_config, lr=0.0)
    net = build_model(tiny_model_config, seed=0)
    before = _params(net)
    optimizer, _ = trainer.make_optimizer(net, config)
    schedule, metrics = trainer.train_step(
        net, optimizer, _batch(tiny_dataset, config), initial_schedule(config), config, LossConfig()
    )
    assert schedule.step == 1
    assert metrics.step == 0
    assert np.isfinite(metrics.loss_total)
    after = _params(net)
    assert all(torch.equal(before[k], after[k]) for k in before)


def test_train_step_is_deterministic(tiny_dataset, tiny_train_config, tiny_model_config):
    results = []
    for _ in range(2):
        net = build_model(tiny_model_config, seed=0)
        optimizer, _ = trainer.make_optimizer(net, tiny_train_config)
        trainer.train_step(
            net, optimizer, _batch(tiny_dataset, tiny_train_config), initial_schedule(tiny_train_config),
            tiny_train_config, LossConfig(),
        )
        results.append(_params(net))
    assert all(torch.equal(results[0][k], results[1][k]) for k in results[0])


def test_gradient_clipping_bounds_the_norm(tiny_dataset, tiny_train_config, tiny_model_config):
    config = replace(tiny_train_config, grad_clip_norm=1e-3)
    net = build_model(tiny_model_config, seed=0)
    optimizer, _ = trainer.make_optimizer(net, config)
    _, metrics = trainer.train_step(
        net, optimizer, _batch(tiny_dataset, config), initial_schedule(config), config, LossConfig()
    )
    assert metrics.grad_norm > 1e-3
    clipped = torch.norm(torch.stack([p.grad.norm() for p in net.parameters() if p.grad is not None]))
    assert float(clipped) <= 1e-3 * (1 + 1e-4)


def test_descent_on_a_fixed_batch(tiny_dataset, tiny_train_config, tiny_model_config):
    improved = 0
    for seed in range(5):
        config = replace(tiny_train_config, seed=seed)
        net = build_model(tiny_model_config, seed=seed)
        optimizer, _ = trainer.make_optimizer(net, config)
        batch = _batch(tiny_dataset, config)
        schedule = initial_schedule(config)
        _, first = trainer.train_step(net, optimizer, batch, schedule, config, LossConfig())
        _, second = trainer.train_step(net, optimizer, batch, schedule, config, LossConfig())
        improved += second.loss_total < first.loss_total
    assert improved >= 4


def test_nan_loss_names_the_sequence(tiny_dataset, tiny_train_config, tiny_model_config):
    net = build_model(tiny_model_config, seed=0)
    with torch.no_grad():
        net.decoder.seg_head.bias.fill_(float("nan"))
    optimizer, _ = trainer.make_optimizer(net, tiny_train_config)
    batch = _batch(tiny_dataset, tiny_train_config)
    with pytest.raises(NonFiniteLossError) as info:
        trainer.train_step(net, optimizer, batch, initial_schedule(tiny_train_config), tiny_train_config, LossConfig())
    assert info.value.seq_id == batch[0].seq_id


def test_zero_steps_returns_the_initial_model(tmp_path, tiny_dataset, tiny_train_config, tiny_model_config):
    config = replace(tiny_train_config, max_steps=0)
    result = trainer.train(tiny_dataset, config, tiny_model_config, out_dir=tmp_path)
    initial = _params(build_model(tiny_model_config, config.seed))
    assert all(torch.equal(initial[k], v) for k, v in _params(result.net).items())
    assert result.history == []
    assert read_metrics_log(Path(tmp_path, Config.metrics_log_file_name)) == []
    assert Path(tmp_path, Config.checkpoints_folder_name, Config.last_checkpoint_file_name).is_file()


def test_training_writes_log_and_checkpoints(tmp_path, tiny_dataset, tiny_train_config, tiny_model_config):
    result = trainer.train(tiny_dataset, tiny_train_config, tiny_model_config, out_dir=tmp_path)
    rows = read_metrics_log(Path(tmp_path, Config.metrics_log_file_name))
    assert [int(r["step"]) for r in rows] == [0, 1, 2]
    assert list(rows[0]) == Config.metrics_log_fields
    assert float(rows[0]["p_gt"]) == 1.0
    ckpts = Path(tmp_path, Config.checkpoints_folder_name)
    assert sorted(p.name for p in ckpts.iterdir()) == ["last.pt", "step_0000002.pt"]
    assert result.checkpoint.step == 3
    assert "smoothed_loss" in load_checkpoint(Path(ckpts, "last.pt")).metrics


def test_fixed_seeds_reproduce_the_final_checkpoint(tiny_dataset, tiny_train_config, tiny_model_config):
    a = trainer.train(tiny_dataset, tiny_train_config, tiny_model_config)
    b = trainer.train(tiny_dataset, tiny_train_config, tiny_model_config)
    assert all(torch.equal(v, b.checkpoint.model_state[k]) for k, v in a.checkpoint.model_state.items())


def test_resume_matches_an_uninterrupted_run(tmp_path, tiny_dataset, tiny_train_config, tiny_model_config):
    full = trainer.train(tiny_dataset, tiny_train_config, tiny_model_config)

    first_dir = Path(tmp_path, "part")
    trainer.train(tiny_dataset, replace(tiny_train_config, max_steps=2), tiny_model_config, out_dir=first_dir)
    resumed = trainer.train(
        tiny_dataset,
        tiny_train_config,
        tiny_model_config,
        out_dir=first_dir,
        resume_from=Path(first_dir, Config.checkpoints_folder_name, "step_0000002.pt"),
    )
    assert resumed.checkpoint.step == 3
    for k, v in full.checkpoint.model_state.items():
        torch.testing.assert_close(resumed.checkpoint.model_state[k], v)
    rows = read_metrics_log(Path(first_dir, Config.metrics_log_file_name))
    assert [int(r["step"]) for r in rows] == [0, 1, 2]


def test_nan_during_training_keeps_last_good_checkpoint(
    tmp_path, monkeypatch, tiny_dataset, tiny_train_config, tiny_model_config
):
    real_step = trainer.train_step

    def failing_step(net, optimizer, batch, schedule, *args):
        if schedule.step == 1:
            raise NonFiniteLossError("segmentation loss is not finite: nan", seq_id=batch[0].seq_id)
        return real_step(net, optimizer, batch, schedule, *args)

    monkeypatch.setattr(trainer, "train_step", failing_step)
    with pytest.raises(NonFiniteLossError):
        trainer.train(tiny_dataset, tiny_train_config, tiny_model_config, out_dir=tmp_path)
    last = load_checkpoint(Path(tmp_path, Config.checkpoints_folder_name, Config.last_checkpoint_file_name))
    assert last.schedule == ScheduleState(step=1, p_gt=pytest.approx(0.75))


def test_empty_dataset(tiny_train_config, tiny_model_config):
    with pytest.raises(DatasetValidationError):
        trainer.train([], tiny_train_config, tiny_model_config)


def test_border_classes_must_match_the_aux_head(tiny_dataset, tiny_train_config, tiny_model_config):
    with pytest.raises(ConfigurationError) as info:
        trainer.train(tiny_dataset, tiny_train_config, tiny_model_config, LossConfig(border_bin_edges=(2, 5)))
    assert info.value.field == "aux_classes"
