import numpy as np
from scipy import ndimage

# 4-connectivity
CROSS = ndimage.generate_binary_structure(2, 1)


def as_binary(mask: np.ndarray, threshold: float = 0.5) -> np.ndarray:
    mask = np.asarray(mask)
    if mask.dtype == bool:
        return mask
    return mask >= threshold


def boundary_pixels(mask: np.ndarray) -> np.ndarray:
    """
    Foreground pixels with at least one background 4-neighbour.

    Pixels outside the image count as background, so foreground touching the
    border is always boundary.
    """
    fg = as_binary(mask)
    if fg.ndim != 2:
        raise ValueError(f"boundary_pixels expects a [H, W] mask, got {fg.shape}")
    eroded = ndimage.binary_erosion(fg, structure=CROSS, border_value=0)
    return fg & ~eroded


def count_components(mask: np.ndarray) -> int:
    _, n = ndimage.label(as_binary(mask), structure=CROSS)
    return int(n)


def mask_areas(masks: np.ndarray) -> np.ndarray:
    masks = as_binary(masks)
    return masks.reshape(masks.shape[0], -1).sum(axis=1).astype(np.int64)
