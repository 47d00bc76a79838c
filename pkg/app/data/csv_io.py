"""CSV import and export of recordings."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pandas as pd

from app.errors import DataError
from app.models.recording import Label, RawRecording
from app.utils.logging import get_logger

logger = get_logger("data.csv_io")


class CsvFormatError(DataError):
    """Raised when a CSV recording is empty, ragged or non-numeric."""

    pass


def load_csv(
    path: Path | str,
    sample_rate_hz: float,
    label: Label | str = Label.HC,
    subject_id: str | None = None,
) -> RawRecording:
    """Load a recording stored one channel per column under a header row.

    Args:
        path: UTF-8 comma-separated file.
        sample_rate_hz: Sampling rate of the rows.
        label: Class of the subject.
        subject_id: Defaults to the file stem.

    Returns:
        RawRecording.

    Raises:
        CsvFormatError: On unreadable files, ragged rows, non-numeric cells or no data rows.
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except pd.errors.EmptyDataError as e:
        raise CsvFormatError(f"{path.name}: no header row") from e
    except pd.errors.ParserError as e:
        raise CsvFormatError(f"{path.name}: ragged rows ({e})") from e
    except (OSError, UnicodeDecodeError) as e:
        raise CsvFormatError(f"cannot read CSV file {path}: {e}") from e

    if frame.empty:
        raise CsvFormatError(f"{path.name}: no data rows")

    # short rows come back as NaN or empty strings
    blank = frame.isna() | frame.apply(lambda column: column.str.strip() == "")
    if blank.to_numpy().any():
        row = int(np.argmax(blank.to_numpy().any(axis=1))) + 2
        raise CsvFormatError(f"{path.name}: ragged or empty cell on line {row}")

    try:
        values = frame.apply(pd.to_numeric, errors="raise").to_numpy(dtype=np.float64)
    except (ValueError, TypeError) as e:
        raise CsvFormatError(f"{path.name}: non-numeric cell ({e})") from e

    recording = RawRecording(
        subject_id=subject_id or path.stem,
        label=Label(label),
        sample_rate_hz=sample_rate_hz,
        channel_names=[str(c).strip() for c in frame.columns],
        samples=values,
    )
    logger.debug(
        "Loaded CSV recording",
        extra={"path": str(path), "channels": recording.n_channels, "samples": recording.n_samples},
    )
    return recording


def write_csv(path: Path | str, recording: RawRecording) -> Path:
    """Write samples one row per time step with channel names as header.

    Values use 17 significant digits so a reload reproduces them exactly.
    """
    path = Path(path)
    pd.DataFrame(recording.samples, columns=recording.channel_names).to_csv(
        path, index=False, float_format="%.17g", encoding="utf-8"
    )
    return path
