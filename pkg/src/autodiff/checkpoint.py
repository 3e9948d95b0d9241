"""
Checkpoint container: a directory with

    * checkpoint.json: format version, config, SHA-256 hash of the config, free-form metadata and the
      tensor index (name, shape, offset and count of float64 values)
    * tensors.bin: little-endian float64 values of every tensor, concatenated in the order of the index
      (sorted by name)
"""

from __future__ import annotations

import json
import os

import numpy as np

from src import SchemaError
from src.utils import config_hash

FORMAT_VERSION = 1
INDEX_FILE = "checkpoint.json"
TENSORS_FILE = "tensors.bin"


def save_checkpoint(output_dir: str, tensors: dict[str, np.ndarray], config: dict, metadata: dict = None):

    os.makedirs(output_dir, exist_ok=True)

    index = []
    offset = 0
    with open(os.path.join(output_dir, TENSORS_FILE), "wb") as f:
        for name in sorted(tensors):
            values = np.ascontiguousarray(tensors[name], dtype="<f8")

            f.write(values.tobytes())
            index.append({"name": name, "shape": list(values.shape), "offset": offset, "count": int(values.size)})
            offset += values.size

    checkpoint_dict = {
        "format_version": FORMAT_VERSION,
        "config": config,
        "config_hash": config_hash(config),
        "metadata": metadata if metadata is not None else {},
        "tensors": index
    }

    with open(os.path.join(output_dir, INDEX_FILE), "w", encoding="utf-8") as f:
        json.dump(checkpoint_dict, f, indent=2, sort_keys=True)
        f.write("\n")


def load_checkpoint(dir_path: str) -> tuple[dict[str, np.ndarray], dict]:
    """
    Returns the tensors by name and the parsed checkpoint.json content
    """

    index_path = os.path.join(dir_path, INDEX_FILE)
    tensors_path = os.path.join(dir_path, TENSORS_FILE)

    for path in (index_path, tensors_path):
        if not os.path.isfile(path):
            raise FileNotFoundError(f"Checkpoint file {path} not found!")

    with open(index_path, "r", encoding="utf-8") as f:
        try:
            checkpoint_dict = json.load(f)
        except json.JSONDecodeError as e:
            raise SchemaError(f"{index_path}: malformed checkpoint index ({e})") from None

    if checkpoint_dict.get("format_version") != FORMAT_VERSION:
        raise SchemaError(f"{index_path}: unsupported checkpoint format {checkpoint_dict.get('format_version')}")

    if checkpoint_dict.get("config_hash") != config_hash(checkpoint_dict.get("config")):
        raise SchemaError(f"{index_path}: config hash mismatch, the checkpoint config was modified")

    flat = np.fromfile(tensors_path, dtype="<f8")

    tensors = {}
    for entry in checkpoint_dict["tensors"]:
        start, count = entry["offset"], entry["count"]
        if start + count > flat.size or int(np.prod(entry["shape"], dtype=np.int64)) != count:
            raise SchemaError(f"{tensors_path}: tensor {entry['name']} is truncated or has an invalid shape")

        tensors[entry["name"]] = flat[start:start + count].astype(np.float64).reshape(entry["shape"])

    return tensors, checkpoint_dict
