"""Dataset manifest: which files to load and how each subject is labelled."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

import yaml

from app.data.csv_io import load_csv
from app.data.edf import infer_label, load_edf
from app.errors import DataError
from app.models.recording import Label, RawRecording
from app.utils.logging import get_logger

logger = get_logger("data.manifest")

MANIFEST_VERSION = 1
ENTRY_KEYS = frozenset({"file", "label", "subject_id", "format", "sample_rate_hz"})


class ManifestError(DataError):
    """Raised when a manifest is unreadable, incomplete or points at missing files."""

    pass


class FileFormat(str, Enum):
    """Recording file format."""

    EDF = "edf"
    CSV = "csv"


@dataclass(frozen=True)
class ManifestEntry:
    """One subject file and its label."""

    file: str
    label: Label
    subject_id: str | None = None
    format: FileFormat = FileFormat.EDF
    sample_rate_hz: float | None = None

    def __post_init__(self) -> None:
        """Validate fields after initialization."""
        if not self.file:
            raise ValueError("manifest entry file cannot be empty")
        object.__setattr__(self, "label", Label(self.label))
        object.__setattr__(self, "format", FileFormat(self.format))
        if self.format is FileFormat.CSV and self.sample_rate_hz is None:
            raise ValueError(f"csv entry {self.file} needs sample_rate_hz")

    @property
    def subject(self) -> str:
        """Subject id, defaulting to the file stem."""
        return self.subject_id or Path(self.file).stem

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "file": self.file,
            "label": self.label.value,
            "format": self.format.value,
        }
        if self.subject_id is not None:
            data["subject_id"] = self.subject_id
        if self.sample_rate_hz is not None:
            data["sample_rate_hz"] = self.sample_rate_hz
        return data


@dataclass
class DatasetManifest:
    """Ordered list of labelled subject files."""

    entries: list[ManifestEntry] = field(default_factory=list)
    description: str = ""

    def __post_init__(self) -> None:
        """Validate fields after initialization."""
        subjects = [e.subject for e in self.entries]
        duplicates = sorted({s for s in subjects if subjects.count(s) > 1})
        if duplicates:
            raise ValueError(f"duplicate subject ids in manifest: {duplicates}")

    @property
    def class_counts(self) -> tuple[int, int]:
        """(SZ subjects, HC subjects)."""
        sz = sum(1 for e in self.entries if e.label is Label.SZ)
        return sz, len(self.entries) - sz

    def to_dict(self) -> dict[str, Any]:
        return {
            "version": MANIFEST_VERSION,
            "description": self.description,
            "entries": [e.to_dict() for e in self.entries],
        }

    @classmethod
    def from_mapping(cls, data: dict[str, Any]) -> DatasetManifest:
        """Build a manifest from parsed JSON.

        Raises:
            ValueError: On unknown keys, bad labels or a wrong version.
        """
        version = data.get("version", MANIFEST_VERSION)
        if version != MANIFEST_VERSION:
            raise ValueError(f"unsupported manifest version {version}")

        raw_entries = data.get("entries")
        if not isinstance(raw_entries, list):
            raise ValueError("manifest needs an 'entries' list")

        entries = []
        for i, raw in enumerate(raw_entries):
            if not isinstance(raw, dict):
                raise ValueError(f"entry {i} must be an object")
            unknown = set(raw) - ENTRY_KEYS
            if unknown:
                raise ValueError(f"entry {i} has unknown keys {sorted(unknown)}")
            if "file" not in raw or "label" not in raw:
                raise ValueError(f"entry {i} needs both 'file' and 'label'")
            entries.append(ManifestEntry(**raw))

        return cls(entries=entries, description=str(data.get("description", "")))


def load_manifest(path: Path | str) -> DatasetManifest:
    """Load a JSON manifest.

    Args:
        path: Manifest file.

    Returns:
        DatasetManifest.

    Raises:
        ManifestError: If the file is unreadable, empty or invalid.
    """
    path = Path(path)
    try:
        content = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ManifestError(f"cannot read manifest {path}: {e}") from e

    try:
        raw = yaml.safe_load(content) if content.strip() else None
    except yaml.YAMLError as e:
        raise ManifestError(f"Failed to parse manifest {path}: {e}") from e

    if not isinstance(raw, dict):
        raise ManifestError(f"manifest {path} is empty or not an object")

    try:
        manifest = DatasetManifest.from_mapping(raw)
    except ValueError as e:
        raise ManifestError(f"Invalid manifest {path}: {e}") from e

    if not manifest.entries:
        raise ManifestError(f"manifest {path} lists no files")

    sz, hc = manifest.class_counts
    logger.info("Loaded manifest", extra={"file": str(path), "sz_subjects": sz, "hc_subjects": hc})
    return manifest


def scan_directory(dataset_dir: Path | str) -> DatasetManifest:
    """Manifest of every ``*.edf`` file in a directory, labelled by file name.

    Raises:
        ManifestError: If the directory has no EDF files or a name carries no label.
    """
    dataset_dir = Path(dataset_dir)
    files = sorted(p for p in dataset_dir.glob("*.edf") if p.is_file())
    if not files:
        raise ManifestError(f"no EDF files in {dataset_dir}")
    try:
        entries = [ManifestEntry(file=p.name, label=infer_label(p)) for p in files]
    except DataError as e:
        raise ManifestError(str(e)) from e
    return DatasetManifest(entries=entries, description=f"scan of {dataset_dir.name}")


def load_recordings(manifest: DatasetManifest, dataset_dir: Path | str) -> list[RawRecording]:
    """Load every manifest file relative to ``dataset_dir``, in manifest order.

    Raises:
        ManifestError: If any listed file is missing.
    """
    dataset_dir = Path(dataset_dir)
    missing = [e.file for e in manifest.entries if not (dataset_dir / e.file).is_file()]
    if missing:
        raise ManifestError(f"{len(missing)} manifest files missing under {dataset_dir}: {missing}")

    recordings = []
    for entry in manifest.entries:
        path = dataset_dir / entry.file
        if entry.format is FileFormat.CSV:
            assert entry.sample_rate_hz is not None
            rec = load_csv(path, entry.sample_rate_hz, label=entry.label, subject_id=entry.subject)
        else:
            rec = load_edf(path, label=entry.label, subject_id=entry.subject)
        recordings.append(rec)
    return recordings
