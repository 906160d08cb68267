import numpy as np
import pytest

from exceptions import ShapeMismatchError
from models.synth_config import AugConfig
from synthdata.augmentation import SpatialTransform, apply_transform, augment, sample_transform


def _pair(T=3, H=32, W=32):
    frames = np.zeros((T, 3, H, W), dtype=np.float32)
    masks = np.zeros((T, 1, H, W), dtype=np.float32)
    frames[:, :, 10:20, 4:12] = 0.8
    masks[:, :, 10:20, 4:12] = 1.0
    return frames, masks


def test_identity_config_leaves_snippet_untouched():
    frames, masks = _pair()
    out_frames, out_masks = augment(frames, masks, AugConfig.identity(), seed=3)
    np.testing.assert_array_equal(out_frames, frames)
    np.testing.assert_array_equal(out_masks, masks)


def test_hflip_mirrors_frames_and_masks():
    frames, masks = _pair()
    out_frames, out_masks = apply_transform(frames, masks, SpatialTransform(hflip=True))
    np.testing.assert_array_equal(out_frames, frames[..., ::-1])
    np.testing.assert_array_equal(out_masks, masks[..., ::-1])
    assert out_masks.flags["C_CONTIGUOUS"]


def test_integer_translation_shifts_the_object():
    frames, masks = _pair()
    _, out_masks = apply_transform(frames, masks, SpatialTransform(translate=(3.0, 5.0)))
    expected = np.zeros_like(masks)
    expected[:, :, 13:23, 9:17] = 1.0
    np.testing.assert_array_equal(out_masks, expected)


def test_same_transform_for_every_frame():
    frames, masks = _pair(T=4)
    out_frames, out_masks = augment(frames, masks, AugConfig(hflip_prob=0.5, max_rotation=15.0), seed=11)
    for t in range(1, 4):
        np.testing.assert_array_equal(out_masks[t], out_masks[0])
        np.testing.assert_array_equal(out_frames[t], out_frames[0])


def test_warped_masks_stay_binary_and_frames_in_range():
    frames, masks = _pair()
    out_frames, out_masks = apply_transform(
        frames, masks, SpatialTransform(angle_deg=17.0, translate=(1.3, -2.1), scale=1.07)
    )
    assert set(np.unique(out_masks)) <= {0.0, 1.0}
    assert out_frames.min() >= 0.0 and out_frames.max() <= 1.0
    assert out_masks.dtype == np.float32


def test_augment_is_deterministic_in_seed():
    frames, masks = _pair()
    aug = AugConfig()
    a = augment(frames, masks, aug, seed=5)
    b = augment(frames, masks, aug, seed=5)
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_array_equal(a[1], b[1])


def test_sample_transform_respects_bounds(rng):
    aug = AugConfig(hflip_prob=0.5, max_rotation=10.0, max_translation=0.1, max_scale_delta=0.1)
    for _ in range(50):
        t = sample_transform(aug, 64, 32, rng)
        assert abs(t.angle_deg) <= 10.0
        assert abs(t.translate[0]) <= 6.4 and abs(t.translate[1]) <= 3.2
        assert 0.9 <= t.scale <= 1.1


def test_unpaired_inputs_are_rejected():
    frames, masks = _pair(T=3)
    with pytest.raises(ShapeMismatchError):
        apply_transform(frames, masks[:2], SpatialTransform())


def test_small_rotation_keeps_a_centred_square_area():
    frames = np.zeros((1, 3, 64, 64), dtype=np.float32)
    masks = np.zeros((1, 1, 64, 64), dtype=np.float32)
    masks[:, :, 22:42, 22:42] = 1.0
    _, out = apply_transform(frames, masks, SpatialTransform(angle_deg=10.0))
    assert abs(out.sum() - masks.sum()) <= 0.05 * masks.sum()
