"""European Data Format (EDF) reader and writer.

Layout: a 256-byte fixed header, then 256 bytes of per-signal header fields
(stored field by field across all signals), then data records. Each record
holds, per signal, ``samples_per_record`` little-endian int16 values that map
to physical units through the signal's digital and physical min/max.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from app.errors import DataError
from app.models.recording import MONTAGE, N_CHANNELS, Label, RawRecording
from app.utils.logging import get_logger

if TYPE_CHECKING:
    from numpy.typing import NDArray

logger = get_logger("data.edf")

HEADER_BYTES = 256
SIGNAL_HEADER_BYTES = 256
ANNOTATION_LABEL = "EDF Annotations"
DIGITAL_MIN = -32768
DIGITAL_MAX = 32767

# (name, width) of the per-signal fields, in file order
SIGNAL_FIELDS = (
    ("label", 16),
    ("transducer", 80),
    ("physical_dimension", 8),
    ("physical_min", 8),
    ("physical_max", 8),
    ("digital_min", 8),
    ("digital_max", 8),
    ("prefilter", 80),
    ("samples_per_record", 8),
    ("reserved", 32),
)


class EdfFormatError(DataError):
    """Raised when an EDF file is unreadable, malformed or truncated."""

    pass


@dataclass
class EdfSignalHeader:
    """Per-signal calibration and layout fields."""

    label: str
    physical_dimension: str
    physical_min: float
    physical_max: float
    digital_min: int
    digital_max: int
    samples_per_record: int

    @property
    def gain(self) -> float:
        return (self.physical_max - self.physical_min) / (self.digital_max - self.digital_min)

    def to_physical(self, digital: NDArray[np.int16]) -> NDArray[np.float64]:
        return (digital.astype(np.float64) - self.digital_min) * self.gain + self.physical_min


@dataclass
class EdfHeader:
    """Fixed header fields needed to decode the data records."""

    patient: str
    recording: str
    header_bytes: int
    n_records: int
    record_duration: float
    signals: list[EdfSignalHeader]

    @property
    def record_samples(self) -> int:
        return sum(s.samples_per_record for s in self.signals)


def normalize_channel_name(label: str) -> str:
    """Strip common EDF label decorations, e.g. ``"EEG Fp1-REF"`` -> ``"Fp1"``."""
    name = label.strip()
    if name.upper().startswith("EEG "):
        name = name[4:].strip()
    for suffix in ("-REF", "-LE", "-AV", "-A1", "-A2"):
        if name.upper().endswith(suffix):
            name = name[: -len(suffix)]
    return name


def infer_label(path: Path) -> Label:
    """Class from the reference dataset's file naming (``s01.edf`` SZ, ``h01.edf`` HC).

    Raises:
        DataError: If the file name carries no class prefix.
    """
    prefix = path.stem[:1].lower()
    if prefix == "s":
        return Label.SZ
    if prefix == "h":
        return Label.HC
    raise DataError(f"cannot infer the class of {path.name}; give the label explicitly")


def _text(raw: bytes, field: str) -> str:
    try:
        return raw.decode("ascii").strip()
    except UnicodeDecodeError as e:
        raise EdfFormatError(f"EDF header field '{field}' is not ASCII") from e


def _number(raw: bytes, field: str) -> float:
    text = _text(raw, field)
    try:
        return float(text)
    except ValueError as e:
        raise EdfFormatError(f"EDF header field '{field}' is not numeric: {text!r}") from e


def parse_header(blob: bytes) -> EdfHeader:
    """Decode the fixed and per-signal headers from the start of a file.

    Raises:
        EdfFormatError: If a field is missing or malformed.
    """
    if len(blob) < HEADER_BYTES:
        raise EdfFormatError(f"file is {len(blob)} bytes, shorter than the EDF header")

    version = _text(blob[0:8], "version")
    if version != "0":
        raise EdfFormatError(f"unsupported EDF version field {version!r}")

    n_signals = int(_number(blob[252:256], "number_of_signals"))
    if n_signals < 1:
        raise EdfFormatError(f"EDF declares {n_signals} signals")

    header_bytes = int(_number(blob[184:192], "header_bytes"))
    expected = HEADER_BYTES + SIGNAL_HEADER_BYTES * n_signals
    if header_bytes != expected:
        raise EdfFormatError(
            f"header size field is {header_bytes}, expected {expected} for {n_signals} signals"
        )
    if len(blob) < expected:
        raise EdfFormatError("file ends inside the signal headers")

    fields: dict[str, list[bytes]] = {}
    offset = HEADER_BYTES
    for name, width in SIGNAL_FIELDS:
        fields[name] = [
            blob[offset + i * width : offset + (i + 1) * width] for i in range(n_signals)
        ]
        offset += width * n_signals

    signals = []
    for i in range(n_signals):
        signal = EdfSignalHeader(
            label=_text(fields["label"][i], "label"),
            physical_dimension=_text(fields["physical_dimension"][i], "physical_dimension"),
            physical_min=_number(fields["physical_min"][i], "physical_min"),
            physical_max=_number(fields["physical_max"][i], "physical_max"),
            digital_min=int(_number(fields["digital_min"][i], "digital_min")),
            digital_max=int(_number(fields["digital_max"][i], "digital_max")),
            samples_per_record=int(_number(fields["samples_per_record"][i], "samples_per_record")),
        )
        if signal.digital_max <= signal.digital_min:
            raise EdfFormatError(f"signal {signal.label!r} has an empty digital range")
        if signal.samples_per_record < 1:
            raise EdfFormatError(f"signal {signal.label!r} has no samples per record")
        signals.append(signal)

    return EdfHeader(
        patient=_text(blob[8:88], "patient"),
        recording=_text(blob[88:168], "recording"),
        header_bytes=header_bytes,
        n_records=int(_number(blob[236:244], "number_of_records")),
        record_duration=_number(blob[244:252], "record_duration"),
        signals=signals,
    )


def load_edf(
    path: Path | str,
    label: Label | str | None = None,
    subject_id: str | None = None,
    strict_channels: bool = False,
) -> RawRecording:
    """Load every EEG signal of an EDF file in physical units.

    Annotation signals are skipped. When all montage electrodes are present the
    channels are reordered to the reference montage.

    Args:
        path: EDF file.
        label: Class of the subject; inferred from the file name when omitted.
        subject_id: Defaults to the file stem.
        strict_channels: Raise instead of warning when the channel count is not 19.

    Returns:
        RawRecording with samples [n_samples x channels].

    Raises:
        EdfFormatError: On unreadable, malformed or truncated files.
    """
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as e:
        raise EdfFormatError(f"cannot read EDF file {path}: {e}") from e

    header = parse_header(blob)
    payload = blob[header.header_bytes :]
    record_bytes = 2 * header.record_samples
    n_records = header.n_records
    if n_records < 0:
        # -1 means "unknown" while recording; count what is there
        n_records = len(payload) // record_bytes
    if len(payload) < n_records * record_bytes:
        raise EdfFormatError(
            f"{path.name}: truncated data, {len(payload)} bytes for "
            f"{n_records} records of {record_bytes} bytes"
        )
    if n_records == 0:
        raise EdfFormatError(f"{path.name}: no data records")

    records = np.frombuffer(payload[: n_records * record_bytes], dtype="<i2").reshape(
        n_records, header.record_samples
    )

    eeg = [(i, s) for i, s in enumerate(header.signals) if s.label != ANNOTATION_LABEL]
    rates = {s.samples_per_record for _, s in eeg}
    if len(rates) != 1:
        raise EdfFormatError(f"{path.name}: signals use different sample rates {sorted(rates)}")
    if header.record_duration <= 0:
        raise EdfFormatError(f"{path.name}: record duration must be positive")

    starts = np.cumsum([0] + [s.samples_per_record for s in header.signals])
    columns = [
        s.to_physical(records[:, starts[i] : starts[i] + s.samples_per_record].reshape(-1))
        for i, s in eeg
    ]
    names = [normalize_channel_name(s.label) for _, s in eeg]
    samples = np.stack(columns, axis=1)

    if len(names) != N_CHANNELS:
        if strict_channels:
            raise EdfFormatError(f"{path.name}: expected {N_CHANNELS} channels, got {len(names)}")
        logger.warning(
            "Unexpected channel count",
            extra={"path": str(path), "channels": len(names), "expected": N_CHANNELS},
        )
    elif set(names) == set(MONTAGE) and tuple(names) != MONTAGE:
        order = [names.index(name) for name in MONTAGE]
        samples = samples[:, order]
        names = list(MONTAGE)

    sample_rate = rates.pop() / header.record_duration
    recording = RawRecording(
        subject_id=subject_id or path.stem,
        label=Label(label) if label is not None else infer_label(path),
        sample_rate_hz=sample_rate,
        channel_names=names,
        samples=samples,
    )

    logger.debug(
        "Loaded EDF recording",
        extra={
            "path": str(path),
            "subject_id": recording.subject_id,
            "channels": recording.n_channels,
            "samples": recording.n_samples,
            "sample_rate_hz": sample_rate,
        },
    )
    return recording


def _field(value: str | float, width: int) -> bytes:
    """Left-aligned, space-padded ASCII field of exactly ``width`` bytes."""
    text = value if isinstance(value, str) else _format_number(value, width)
    if len(text) > width:
        raise ValueError(f"value {text!r} does not fit an EDF field of width {width}")
    return text.ljust(width).encode("ascii")


def _format_number(value: float, width: int) -> str:
    if float(value).is_integer() and len(str(int(value))) <= width:
        return str(int(value))
    for digits in range(width, 0, -1):
        text = f"{value:.{digits}g}"
        if len(text) <= width:
            return text
    raise ValueError(f"cannot fit {value} into {width} characters")


def _physical_range(column: NDArray[np.float64]) -> tuple[float, float]:
    """Physical min/max as they will read back from 8-character fields."""
    low, high = float(column.min()), float(column.max())
    if high <= low:
        high = low + 1.0
    # round outward so the stored range still covers the data
    lo = float(_format_number(math.floor(low * 1000) / 1000, 8))
    if lo > low:
        lo = float(math.floor(low))
    hi = float(_format_number(math.ceil(high * 1000) / 1000, 8))
    if hi < high:
        hi = float(math.ceil(high))
    return lo, hi


def write_edf(
    path: Path | str,
    recording: RawRecording,
    physical_range: tuple[float, float] | None = None,
    digital_range: tuple[int, int] = (DIGITAL_MIN, DIGITAL_MAX),
) -> Path:
    """Write a recording as 16-bit EDF.

    One-second records are used when the sample count allows it, otherwise the
    whole signal goes into a single record.

    Args:
        path: Output file.
        recording: Recording to store.
        physical_range: Calibration range for every channel; per-channel data
            range when omitted.
        digital_range: Stored integer range.

    Returns:
        The written path.
    """
    path = Path(path)
    rate = recording.sample_rate_hz
    n = recording.n_samples
    if float(rate).is_integer() and n % int(rate) == 0:
        per_record, duration = int(rate), 1.0
    else:
        per_record, duration = n, n / rate
    n_records = n // per_record
    ns = recording.n_channels

    header = b"".join(
        [
            _field("0", 8),
            _field(recording.subject_id[:80], 80),
            _field(f"Startdate X X X label={recording.label.value}"[:80], 80),
            _field("01.01.00", 8),
            _field("00.00.00", 8),
            _field(HEADER_BYTES + SIGNAL_HEADER_BYTES * ns, 8),
            _field("", 44),
            _field(n_records, 8),
            _field(duration, 8),
            _field(ns, 4),
        ]
    )

    if physical_range is None:
        ranges = [_physical_range(recording.samples[:, c]) for c in range(ns)]
    else:
        ranges = [physical_range] * ns
    dig_lo, dig_hi = digital_range
    values: dict[str, list[str | float]] = {
        "label": list(recording.channel_names),
        "transducer": [""] * ns,
        "physical_dimension": ["uV"] * ns,
        "physical_min": [lo for lo, _ in ranges],
        "physical_max": [hi for _, hi in ranges],
        "digital_min": [dig_lo] * ns,
        "digital_max": [dig_hi] * ns,
        "prefilter": [""] * ns,
        "samples_per_record": [per_record] * ns,
        "reserved": [""] * ns,
    }
    signal_header = b"".join(
        _field(v, width) for name, width in SIGNAL_FIELDS for v in values[name]
    )

    digital = np.empty((n, ns), dtype="<i2")
    span = dig_hi - dig_lo
    for c, (lo, hi) in enumerate(ranges):
        scaled = (recording.samples[:, c] - lo) / (hi - lo) * span + dig_lo
        digital[:, c] = np.clip(np.round(scaled), dig_lo, dig_hi)

    # records are signal-major inside each record
    data = digital.reshape(n_records, per_record, ns).transpose(0, 2, 1)
    path.write_bytes(header + signal_header + np.ascontiguousarray(data).tobytes())
    return path
