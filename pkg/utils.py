import hashlib
import json
import shutil
from pathlib import Path
from typing import Any, Iterable, Union

import numpy as np


def read_json_file(json_path: Union[str, Path], encoding: str = "utf-8") -> Any:
    """
    Read and parse a JSON file.

    Returns:
        The parsed JSON content (usually a dict or list).

    Raises:
        FileNotFoundError: if the file doesn't exist
        ValueError: if the JSON is invalid
    """
    path = Path(json_path)

    try:
        with path.open("r", encoding=encoding) as f:
            return json.load(f)
    except FileNotFoundError:
        raise FileNotFoundError(f"JSON file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise ValueError(f"Invalid JSON in {path} (line {e.lineno}, col {e.colno}): {e.msg}") from e


def write_json_file(json_path: Union[str, Path], data: Any, encoding: str = "utf-8") -> Path:
    path = Path(json_path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(data, indent=2, sort_keys=False), encoding=encoding)
    except OSError as e:
        raise OSError(f"Could not write JSON file {path}: {e}") from e
    return path


def derive_seed(*parts: int) -> int:
    """
    Fold a tuple of integers into one 32-bit seed.

    SeedSequence mixes entropy so (seed, step, item) tuples give independent
    streams without any global RNG state.
    """
    return int(np.random.SeedSequence([int(x) for x in parts]).generate_state(1)[0])


def prepare_output_dir(out_dir: Union[str, Path], *, force: bool = False) -> Path:
    """
    Create `out_dir`, refusing to touch a non-empty directory unless `force`.
    """
    out = Path(out_dir)
    if out.exists() and any(out.iterdir()):
        if not force:
            raise FileExistsError(f"Output directory is not empty: {out} (use --force to overwrite)")
        shutil.rmtree(out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def hash_files(paths: Iterable[Path], root: Path) -> str:
    digest = hashlib.sha256()
    for path in sorted(paths):
        digest.update(str(path.relative_to(root)).replace("\\", "/").encode("utf-8"))
        digest.update(path.read_bytes())
    return digest.hexdigest()


def hash_directory(root: Union[str, Path]) -> str:
    root = Path(root)
    return hash_files((f for f in root.rglob("*") if f.is_file()), root)
