"""Binary frame cache so runs do not re-parse EDF files.

Layout, all little-endian:

    magic      4 bytes  b"SZBC"
    version    uint16
    count      uint32   number of frames
    frame_len  uint32
    channels   uint32
    hash       32 bytes SHA-256 of the inputs the cache was built from
    metadata   per frame: label uint8 (0 SZ, 1 HC), frame_index uint32,
               subject length uint16, subject UTF-8 bytes
    payload    count * frame_len * channels float64, frame by frame, time-major
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from app.data.manifest import load_recordings
from app.data.preprocessing import frames_from_recordings
from app.errors import DataError
from app.models.recording import Frame, FrameSet, Label
from app.utils.logging import get_logger

if TYPE_CHECKING:
    from app.data.manifest import DatasetManifest

logger = get_logger("data.cache")

CACHE_MAGIC = b"SZBC"
CACHE_VERSION = 1
_HEADER = struct.Struct("<4sHIII32s")
_FRAME_META = struct.Struct("<BIH")
_LABELS = (Label.SZ, Label.HC)


class CacheError(DataError):
    """Raised when a cache file is malformed, truncated or stale."""

    pass


@dataclass(frozen=True)
class CacheHeader:
    """Fixed-size cache header."""

    version: int
    count: int
    frame_len: int
    channels: int
    input_hash: str


def input_hash(manifest: DatasetManifest, dataset_dir: Path | str, frame_len: int) -> str:
    """SHA-256 over the manifest, the frame length and every listed file's bytes."""
    dataset_dir = Path(dataset_dir)
    digest = hashlib.sha256()
    digest.update(json.dumps(manifest.to_dict(), sort_keys=True).encode("utf-8"))
    digest.update(struct.pack("<I", frame_len))
    for entry in manifest.entries:
        path = dataset_dir / entry.file
        if path.is_file():
            digest.update(hashlib.sha256(path.read_bytes()).digest())
    return digest.hexdigest()


def write_cache(path: Path | str, frames: FrameSet, source_hash: str) -> Path:
    """Serialize raw frames; identical inputs give byte-identical files.

    Raises:
        CacheError: If the set is empty or frames differ in shape.
    """
    path = Path(path)
    if not frames.frames:
        raise CacheError("cannot cache an empty frame set")
    shapes = {f.data.shape for f in frames.frames}
    if len(shapes) != 1:
        raise CacheError(f"frames have mixed shapes {sorted(shapes)}")
    frame_len, channels = shapes.pop()

    parts = [
        _HEADER.pack(
            CACHE_MAGIC,
            CACHE_VERSION,
            len(frames),
            frame_len,
            channels,
            bytes.fromhex(source_hash),
        )
    ]
    for frame in frames.frames:
        subject = frame.subject_id.encode("utf-8")
        parts.append(_FRAME_META.pack(frame.label.index, frame.frame_index, len(subject)))
        parts.append(subject)
    parts.append(frames.stack().astype("<f8").tobytes())

    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(b"".join(parts))
    logger.info(
        "Wrote frame cache",
        extra={"path": str(path), "frames": len(frames), "bytes": path.stat().st_size},
    )
    return path


def read_header(blob: bytes) -> CacheHeader:
    """Parse and check the fixed-size header."""
    if len(blob) < _HEADER.size:
        raise CacheError("cache file shorter than its header")
    magic, version, count, frame_len, channels, digest = _HEADER.unpack_from(blob)
    if magic != CACHE_MAGIC:
        raise CacheError(f"not a frame cache (magic {magic!r})")
    if version != CACHE_VERSION:
        raise CacheError(f"unsupported cache version {version}")
    return CacheHeader(version, count, frame_len, channels, digest.hex())


def read_cache(path: Path | str, expected_hash: str | None = None) -> tuple[FrameSet, CacheHeader]:
    """Load a frame cache written by write_cache.

    Args:
        path: Cache file.
        expected_hash: When given, the stored input hash must match.

    Raises:
        CacheError: On unreadable, malformed, truncated or stale caches.
    """
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as e:
        raise CacheError(f"cannot read cache {path}: {e}") from e

    header = read_header(blob)
    if expected_hash is not None and header.input_hash != expected_hash:
        raise CacheError(f"cache {path} is stale: input hash differs")

    offset = _HEADER.size
    meta: list[tuple[Label, int, str]] = []
    try:
        for _ in range(header.count):
            label_index, frame_index, length = _FRAME_META.unpack_from(blob, offset)
            offset += _FRAME_META.size
            subject = blob[offset : offset + length].decode("utf-8")
            offset += length
            meta.append((_LABELS[label_index], frame_index, subject))
    except (struct.error, IndexError, UnicodeDecodeError) as e:
        raise CacheError(f"cache {path}: corrupt frame metadata") from e

    values = header.count * header.frame_len * header.channels
    if len(blob) - offset != 8 * values:
        raise CacheError(
            f"cache {path}: payload has {len(blob) - offset} bytes, expected {8 * values}"
        )
    data = np.frombuffer(blob, dtype="<f8", count=values, offset=offset).astype(np.float64)
    data = data.reshape(header.count, header.frame_len, header.channels)

    frames = FrameSet(
        [
            Frame(subject_id=subject, label=label, data=data[i], frame_index=index)
            for i, (label, index, subject) in enumerate(meta)
        ]
    )
    return frames, header


def ingest(
    manifest: DatasetManifest,
    dataset_dir: Path | str,
    cache_path: Path | str,
    frame_len: int,
) -> FrameSet:
    """Return cached frames when the cache matches the inputs, else rebuild it."""
    cache_path = Path(cache_path)
    source_hash = input_hash(manifest, dataset_dir, frame_len)
    if cache_path.is_file():
        try:
            frames, _ = read_cache(cache_path, expected_hash=source_hash)
        except CacheError as e:
            logger.info("Rebuilding frame cache", extra={"path": str(cache_path), "reason": str(e)})
        else:
            logger.info(
                "Reusing frame cache", extra={"path": str(cache_path), "frames": len(frames)}
            )
            return frames

    frames = frames_from_recordings(load_recordings(manifest, dataset_dir), frame_len)
    write_cache(cache_path, frames, source_hash)
    return frames
