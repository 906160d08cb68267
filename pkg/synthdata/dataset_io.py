"""
On-disk dataset layout.

    root/manifest.json
    root/sequences/<id>/frames/00000.png   8-bit RGB
    root/sequences/<id>/masks/00000.png    8-bit grayscale, 0 / 255
"""
from __future__ import annotations

from pathlib import Path
from typing import List, Sequence, Union

import jsonschema
import numpy as np
from PIL import Image

from configuration import Configuration as Config
from constants import ENCODER_STRIDE, MASK_PNG_FOREGROUND, MASK_PNG_THRESHOLD
from exceptions import CountMismatchError, DatasetValidationError, FrameSizeError, MissingFileError
from loggers.synthdata_logger import synthdata_logger as logger
from models.sequence import Manifest, ManifestEntry, MaskSequence, SequencePair, VideoSequence, check_pair
from utils import read_json_file, write_json_file


def sequence_dirs(root: Path, seq_id: str) -> tuple[Path, Path]:
    base = Path(root, Config.sequences_folder_name, seq_id)
    return Path(base, Config.frames_folder_name), Path(base, Config.masks_folder_name)


def _write_png(array: np.ndarray, path: Path) -> None:
    # uint8 [H, W, 3] saves as RGB, uint8 [H, W] as L
    try:
        Image.fromarray(array).save(path)
    except OSError as e:
        raise OSError(f"Could not write image {path}: {e}") from e


def write_dataset(pairs: Sequence[SequencePair], root: Union[str, Path]) -> Manifest:
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    manifest = Manifest()
    for video, masks in pairs:
        check_pair(video, masks)
        frames_dir, masks_dir = sequence_dirs(root, video.seq_id)
        frames_dir.mkdir(parents=True, exist_ok=True)
        masks_dir.mkdir(parents=True, exist_ok=True)

        frames_u8 = np.rint(np.clip(video.frames, 0.0, 1.0) * 255.0).astype(np.uint8).transpose(0, 2, 3, 1)
        masks_u8 = (masks.masks[:, 0] >= 0.5).astype(np.uint8) * MASK_PNG_FOREGROUND
        for t in range(video.T):
            name = Config.frame_file_pattern.format(t)
            _write_png(np.ascontiguousarray(frames_u8[t]), Path(frames_dir, name))
            _write_png(np.ascontiguousarray(masks_u8[t]), Path(masks_dir, name))
        manifest.sequences.append(ManifestEntry(id=video.seq_id, length=video.T))
        logger.debug(f"wrote {video.T} frames for {video.seq_id} to {frames_dir.parent}")

    manifest_path = write_json_file(Path(root, Config.manifest_file_name), manifest.to_dict())
    logger.info(f"wrote manifest with {len(manifest.sequences)} sequences to {manifest_path}")
    return manifest


def read_manifest(root: Union[str, Path]) -> Manifest:
    manifest_path = Path(root, Config.manifest_file_name)
    if not manifest_path.is_file():
        raise MissingFileError(manifest_path)
    data = read_json_file(manifest_path)
    schema = read_json_file(Path(Config.templates_dir, Config.manifest_schema_name))
    try:
        jsonschema.validate(data, schema)
    except jsonschema.ValidationError as e:
        raise DatasetValidationError(f"{manifest_path}: {e.message}") from e
    return Manifest.from_dict(data)


def _read_frame(path: Path) -> np.ndarray:
    with Image.open(path) as img:
        return np.asarray(img.convert("RGB"), dtype=np.float32).transpose(2, 0, 1) / 255.0


def _read_mask(path: Path) -> np.ndarray:
    with Image.open(path) as img:
        return (np.asarray(img.convert("L")) >= MASK_PNG_THRESHOLD).astype(np.float32)[None]


def load_sequence(root: Union[str, Path], entry: ManifestEntry) -> SequencePair:
    frames_dir, masks_dir = sequence_dirs(Path(root), entry.id)
    expected = [Config.frame_file_pattern.format(t) for t in range(entry.length)]
    for folder in (frames_dir, masks_dir):
        for name in expected:
            if not Path(folder, name).is_file():
                raise MissingFileError(Path(folder, name))

    n_frames = len(list(frames_dir.glob("*.png")))
    n_masks = len(list(masks_dir.glob("*.png")))
    if n_frames != n_masks or n_frames != entry.length:
        raise CountMismatchError(
            f"{entry.id}: manifest length {entry.length}, {n_frames} frame files, {n_masks} mask files"
        )

    frames = np.stack([_read_frame(Path(frames_dir, name)) for name in expected])
    masks = np.stack([_read_mask(Path(masks_dir, name)) for name in expected])
    H, W = frames.shape[2:]
    if H % ENCODER_STRIDE or W % ENCODER_STRIDE:
        raise FrameSizeError(f"{entry.id}: frame size {H}x{W} is not a multiple of {ENCODER_STRIDE}")
    if masks.shape[2:] != frames.shape[2:]:
        raise FrameSizeError(f"{entry.id}: mask size {masks.shape[2:]} differs from frame size {H}x{W}")
    if not masks[0].any():
        raise DatasetValidationError(f"{entry.id}: the object is absent from frame 0")
    return VideoSequence(frames=frames, seq_id=entry.id), MaskSequence(masks=masks, object_id=entry.id)


def load_sequence_dir(sequence_dir: Union[str, Path]) -> SequencePair:
    """Load one `sequences/<id>` directory on its own, taking the length from the frame files."""
    sequence_dir = Path(sequence_dir)
    frames_dir = Path(sequence_dir, Config.frames_folder_name)
    if not frames_dir.is_dir():
        raise MissingFileError(frames_dir)
    entry = ManifestEntry(id=sequence_dir.name, length=len(list(frames_dir.glob("*.png"))))
    return load_sequence(sequence_dir.parent.parent, entry)


def load_dataset(root: Union[str, Path]) -> List[SequencePair]:
    root = Path(root)
    manifest = read_manifest(root)
    pairs = [load_sequence(root, entry) for entry in manifest.sequences]
    logger.info(f"loaded {len(pairs)} sequences from {root}")
    return pairs
