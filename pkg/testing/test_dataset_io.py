import json
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from configuration import Configuration as Config
from exceptions import CountMismatchError, DatasetValidationError, FrameSizeError, MissingFileError
from models.sequence import ManifestEntry, MaskSequence, VideoSequence
from synthdata.dataset_io import load_dataset, load_sequence, load_sequence_dir, read_manifest, sequence_dirs, write_dataset


@pytest.fixture
def written(tmp_path, tiny_dataset):
    write_dataset(tiny_dataset, tmp_path)
    return tmp_path


def test_write_then_load_preserves_masks_and_quantized_frames(written, tiny_dataset):
    loaded = load_dataset(written)
    assert [v.seq_id for v, _ in loaded] == ["seq0000", "seq0001"]
    for (v0, m0), (v1, m1) in zip(tiny_dataset, loaded):
        np.testing.assert_array_equal(m1.masks, m0.masks)
        np.testing.assert_allclose(v1.frames, v0.frames, atol=0.5 / 255 + 1e-6)


def test_manifest_lists_ids_and_lengths(written):
    manifest = read_manifest(written)
    assert [(e.id, e.length) for e in manifest.sequences] == [("seq0000", 6), ("seq0001", 6)]


def test_layout_on_disk(written):
    frames_dir, masks_dir = sequence_dirs(written, "seq0000")
    assert sorted(p.name for p in frames_dir.iterdir()) == [f"{t:05d}.png" for t in range(6)]
    with Image.open(Path(masks_dir, "00000.png")) as img:
        assert img.mode == "L"
        assert set(np.unique(np.asarray(img))) <= {0, 255}
    with Image.open(Path(frames_dir, "00000.png")) as img:
        assert img.mode == "RGB"


def test_missing_mask_file_is_named(written):
    _, masks_dir = sequence_dirs(written, "seq0001")
    Path(masks_dir, "00003.png").unlink()
    with pytest.raises(MissingFileError) as info:
        load_dataset(written)
    assert info.value.path.name == "00003.png"


def test_missing_manifest(tmp_path):
    with pytest.raises(MissingFileError):
        load_dataset(tmp_path)


def test_invalid_manifest(tmp_path):
    Path(tmp_path, Config.manifest_file_name).write_text(json.dumps({"sequences": [{"id": "a", "length": 1}]}))
    with pytest.raises(DatasetValidationError):
        read_manifest(tmp_path)


def test_extra_frame_is_a_count_mismatch(written):
    frames_dir, _ = sequence_dirs(written, "seq0000")
    Image.new("RGB", (32, 32)).save(Path(frames_dir, "00006.png"))
    with pytest.raises(CountMismatchError):
        load_sequence(written, ManifestEntry(id="seq0000", length=6))


def test_manifest_length_disagreeing_with_files(written):
    with pytest.raises(CountMismatchError):
        load_sequence(written, ManifestEntry(id="seq0000", length=5))


def test_frame_size_not_a_multiple_of_stride(tmp_path):
    frames_dir, masks_dir = sequence_dirs(tmp_path, "odd")
    frames_dir.mkdir(parents=True)
    masks_dir.mkdir(parents=True)
    for t in range(2):
        Image.new("RGB", (40, 32)).save(Path(frames_dir, f"{t:05d}.png"))
        Image.new("L", (40, 32), color=255).save(Path(masks_dir, f"{t:05d}.png"))
    with pytest.raises(FrameSizeError):
        load_sequence(tmp_path, ManifestEntry(id="odd", length=2))


def test_empty_first_mask_is_rejected(tmp_path):
    frames = np.full((3, 3, 32, 32), 0.5, dtype=np.float32)
    masks = np.zeros((3, 1, 32, 32), dtype=np.float32)
    masks[1:, :, 4:8, 4:8] = 1.0
    write_dataset([(VideoSequence(frames, "late"), MaskSequence(masks, "late"))], tmp_path)
    with pytest.raises(DatasetValidationError, match="frame 0"):
        load_dataset(tmp_path)


def test_load_single_sequence_dir(written, tiny_dataset):
    video, masks = load_sequence_dir(Path(written, Config.sequences_folder_name, "seq0001"))
    assert video.seq_id == "seq0001"
    assert video.T == 6
    np.testing.assert_array_equal(masks.masks, tiny_dataset[1][1].masks)


def test_empty_dataset_writes_an_empty_manifest(tmp_path):
    manifest = write_dataset([], tmp_path)
    assert manifest.sequences == []
    assert read_manifest(tmp_path).sequences == []
    assert load_dataset(tmp_path) == []


def test_file_count_per_sequence(tmp_path):
    from models.synth_config import SynthConfig
    from synthdata.generator import generate_sequence

    pairs = [generate_sequence(SynthConfig(H=32, W=32, T=5, object_size=8, seed=s), seq_id=f"s{s}") for s in range(2)]
    write_dataset(pairs, tmp_path)
    for seq_id in ("s0", "s1"):
        frames_dir, masks_dir = sequence_dirs(tmp_path, seq_id)
        assert len(list(frames_dir.glob("*.png"))) == 5
        assert len(list(masks_dir.glob("*.png"))) == 5
