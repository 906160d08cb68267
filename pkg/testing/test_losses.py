import math
from collections import deque

import numpy as np
import pytest
import torch

from constants import DISTANCE_SENTINEL
from exceptions import InvalidTargetError, NonFiniteLossError, ShapeMismatchError
from losses.border import border_classes, border_loss, border_targets, distance_transform
from losses.objective import snippet_loss, total_loss
from losses.segmentation import balanced_bce
from models.enums import BetaScope
from models.loss_config import LossConfig


def _bce_oracle(p, gt, eps=1e-7):
    p = np.clip(p, eps, 1 - eps).ravel()
    gt = gt.ravel()
    beta = 1.0 - gt.mean()
    w_pos = 1.0 if gt.all() else beta
    w_neg = 1.0 if not gt.any() else 1.0 - beta
    total = 0.0
    for pi, gi in zip(p, gt):
        total -= w_pos * math.log(pi) if gi else w_neg * math.log(1.0 - pi)
    return total


def _bfs_oracle(mask):
    """Multi-source breadth-first search from every boundary pixel over the 4-neighbour grid."""
    H, W = mask.shape
    fg = mask.astype(bool)
    dist = np.full((H, W), -1, dtype=np.int64)
    queue = deque()
    for y in range(H):
        for x in range(W):
            if not fg[y, x]:
                continue
            neighbours = [(y - 1, x), (y + 1, x), (y, x - 1), (y, x + 1)]
            if any(not (0 <= a < H and 0 <= b < W) or not fg[a, b] for a, b in neighbours):
                dist[y, x] = 0
                queue.append((y, x))
    if not queue:
        return np.full((H, W), DISTANCE_SENTINEL, dtype=np.int64)
    while queue:
        y, x = queue.popleft()
        for a, b in ((y - 1, x), (y + 1, x), (y, x - 1), (y, x + 1)):
            if 0 <= a < H and 0 <= b < W and dist[a, b] < 0:
                dist[a, b] = dist[y, x] + 1
                queue.append((a, b))
    return dist


def test_bce_half_probability_balanced_target():
    gt = torch.tensor([[[1.0, 0.0], [0.0, 1.0]]], dtype=torch.float64)
    loss = balanced_bce(torch.full_like(gt, 0.5), gt)
    assert loss.item() == pytest.approx(0.5 * 4 * math.log(2), abs=1e-9)


def test_bce_perfect_prediction_is_near_zero():
    gt = torch.tensor([[[1.0, 0.0], [0.0, 1.0]]], dtype=torch.float64)
    eps = 1e-7
    assert 0.0 <= balanced_bce(gt.clone(), gt, eps=eps).item() <= 4 * eps


def test_bce_matches_pixel_loop(rng):
    for _ in range(100):
        p = rng.uniform(0.01, 0.99, size=(1, 4, 4))
        gt = (rng.uniform(size=(1, 4, 4)) < rng.uniform(0.1, 0.9)).astype(np.float64)
        loss = balanced_bce(torch.from_numpy(p), torch.from_numpy(gt))
        assert loss.item() == pytest.approx(_bce_oracle(p, gt), rel=1e-9, abs=1e-9)


def test_bce_on_balanced_target_is_half_the_unweighted_sum(rng):
    gt = np.zeros((1, 4, 4))
    gt[0, :2] = 1.0
    p = rng.uniform(0.01, 0.99, size=(1, 4, 4))
    unweighted = -np.sum(gt * np.log(p) + (1 - gt) * np.log(1 - p))
    loss = balanced_bce(torch.from_numpy(p), torch.from_numpy(gt))
    assert loss.item() == pytest.approx(0.5 * unweighted, rel=1e-9)


def test_bce_frame_scope_sums_per_frame_losses(rng):
    p = rng.uniform(0.01, 0.99, size=(3, 4, 4))
    gt = (rng.uniform(size=(3, 4, 4)) < 0.5).astype(np.float64)
    loss = balanced_bce(torch.from_numpy(p), torch.from_numpy(gt), beta_scope=BetaScope.FRAME)
    expected = sum(_bce_oracle(p[i], gt[i]) for i in range(3))
    assert loss.item() == pytest.approx(expected, abs=1e-9)


def test_bce_all_background_uses_only_background_term():
    gt = torch.zeros(1, 2, 2, dtype=torch.float64)
    p = torch.full_like(gt, 0.25)
    assert balanced_bce(p, gt).item() == pytest.approx(-4 * math.log(0.75))


def test_bce_is_non_negative(rng):
    for _ in range(10):
        p = torch.from_numpy(rng.uniform(size=(2, 5, 5)))
        gt = torch.from_numpy((rng.uniform(size=(2, 5, 5)) < 0.3).astype(np.float64))
        assert balanced_bce(p, gt).item() >= 0.0


def test_bce_rejects_soft_targets_and_shape_mismatch():
    with pytest.raises(InvalidTargetError):
        balanced_bce(torch.full((1, 2, 2), 0.5), torch.full((1, 2, 2), 0.3))
    with pytest.raises(ShapeMismatchError):
        balanced_bce(torch.full((1, 2, 2), 0.5), torch.zeros(1, 2, 3))


def test_bce_gradient_is_finite_at_saturated_predictions():
    p = torch.tensor([[[0.0, 1.0], [1.0, 0.0]]], requires_grad=True)
    gt = torch.tensor([[[1.0, 0.0], [1.0, 0.0]]])
    balanced_bce(p, gt).backward()
    assert torch.isfinite(p.grad).all()


def test_distance_of_single_pixel():
    mask = np.zeros((5, 5), dtype=np.uint8)
    mask[2, 2] = 1
    d = distance_transform(mask)
    assert d[2, 2] == 0
    assert d[1, 2] == d[3, 2] == d[2, 1] == d[2, 3] == 1
    assert d[1, 1] == d[3, 3] == d[1, 3] == d[3, 1] == 2


def test_distance_of_full_mask_uses_background_padding():
    d = distance_transform(np.ones((4, 4), dtype=np.uint8))
    expected = np.ones((4, 4), dtype=np.int64)
    expected[[0, -1], :] = 0
    expected[:, [0, -1]] = 0
    np.testing.assert_array_equal(d, expected)


def test_distance_of_empty_mask_is_sentinel():
    d = distance_transform(np.zeros((3, 4)))
    assert d.dtype == np.int64
    assert np.all(d == DISTANCE_SENTINEL)


def test_distance_matches_bfs():
    r = np.random.default_rng(7)
    for density in r.uniform(0.05, 0.98, size=100):
        mask = r.uniform(size=(16, 16)) < density
        np.testing.assert_array_equal(distance_transform(mask), _bfs_oracle(mask))


def test_distance_is_one_lipschitz(rng):
    mask = rng.uniform(size=(16, 16)) < 0.4
    d = distance_transform(mask)
    assert np.abs(np.diff(d, axis=0)).max() <= 1
    assert np.abs(np.diff(d, axis=1)).max() <= 1


def test_bin_arithmetic():
    classes = border_classes(np.array([0, 1, 2, 3, 5, 6, 10, 11, 20, DISTANCE_SENTINEL]), (2, 5, 10))
    np.testing.assert_array_equal(classes, [0, 0, 0, 1, 1, 2, 2, 3, 3, 3])


def test_border_targets_shapes_and_sentinel_class():
    masks = np.zeros((2, 1, 8, 8), dtype=np.float32)
    masks[0, 0, 2:6, 2:6] = 1.0
    targets = border_targets(masks, (2, 5, 10))
    assert targets.classes.shape == (2, 8, 8)
    assert targets.num_classes == 4
    assert np.all(targets.classes[1] == 3)
    assert border_targets(masks[0, 0]).classes.shape == (1, 8, 8)


def test_border_targets_match_binned_bfs(rng):
    mask = rng.uniform(size=(16, 16)) < 0.5
    expected = np.searchsorted([2, 5, 10], _bfs_oracle(mask), side="left")
    np.testing.assert_array_equal(border_targets(mask, (2, 5, 10)).classes[0], expected)


def test_border_loss_confident_logits():
    classes = torch.tensor([[[0, 1], [3, 2]]])
    logits = torch.full((1, 4, 2, 2), -20.0)
    logits.scatter_(1, classes.unsqueeze(1), 20.0)
    assert border_loss(logits, classes).item() < 1e-6


def test_border_loss_uniform_logits():
    classes = torch.tensor([[[0, 1], [3, 2]]])
    assert border_loss(torch.zeros(1, 4, 2, 2), classes).item() == pytest.approx(math.log(4))


def test_border_loss_matches_softmax_loop(rng):
    logits = rng.normal(size=(1, 4, 3, 3))
    classes = rng.integers(0, 4, size=(1, 3, 3))
    total = 0.0
    for y in range(3):
        for x in range(3):
            z = logits[0, :, y, x]
            total -= z[classes[0, y, x]] - math.log(np.exp(z).sum())
    loss = border_loss(torch.from_numpy(logits), torch.from_numpy(classes))
    assert loss.item() == pytest.approx(total / 9, abs=1e-9)


def test_border_loss_errors():
    with pytest.raises(InvalidTargetError):
        border_loss(torch.zeros(1, 4, 2, 2), torch.tensor([[[0, 4], [1, 1]]]))
    targets = border_targets(np.ones((2, 2)), (2, 5, 10))
    with pytest.raises(ShapeMismatchError):
        border_loss(torch.zeros(1, 3, 2, 2), targets)


@pytest.mark.parametrize(
    "lam, expected",
    [(1.0, 1.0), (0.0, 0.5), (0.8, 0.9)],
)
def test_total_loss_weighting(lam, expected):
    assert total_loss(1.0, 0.5, LossConfig(lambda_seg=lam)) == pytest.approx(expected)


def test_total_loss_refuses_nan():
    with pytest.raises(NonFiniteLossError) as info:
        total_loss(torch.tensor(float("nan")), 0.5, LossConfig(), seq_id="seq0003[2:7]")
    assert info.value.seq_id == "seq0003[2:7]"
    assert "seq0003[2:7]" in str(info.value)


def test_snippet_loss_combines_terms():
    gt = torch.zeros(2, 1, 8, 8)
    gt[:, :, 2:6, 2:6] = 1.0
    targets = border_targets(gt.numpy(), (2, 5, 10))
    probs = torch.full_like(gt, 0.5)
    logits = torch.zeros(2, 4, 8, 8)
    config = LossConfig()
    out = snippet_loss(probs, logits, gt, targets, config)
    assert out.seg.item() == pytest.approx(balanced_bce(probs, gt).item())
    assert out.aux.item() == pytest.approx(2 * math.log(4))
    assert out.total.item() == pytest.approx(0.8 * out.seg.item() + 0.2 * out.aux.item())
