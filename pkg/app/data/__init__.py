"""EEG loading, framing, normalization and fold assignment."""

from app.data.cache import CacheError, ingest, read_cache, write_cache
from app.data.csv_io import CsvFormatError, load_csv, write_csv
from app.data.edf import EdfFormatError, load_edf, write_edf
from app.data.folds import check_split, make_split, split_by_subject, split_kfold
from app.data.manifest import DatasetManifest, ManifestEntry, ManifestError, load_manifest
from app.data.preprocessing import (
    flatten_frame,
    normalize,
    normalize_frames,
    reduce_frameset,
    segment,
    synthetic_frameset,
    unflatten_frame,
)

__all__ = [
    "CacheError",
    "CsvFormatError",
    "DatasetManifest",
    "EdfFormatError",
    "ManifestEntry",
    "ManifestError",
    "check_split",
    "flatten_frame",
    "ingest",
    "load_csv",
    "load_edf",
    "load_manifest",
    "make_split",
    "normalize",
    "normalize_frames",
    "read_cache",
    "reduce_frameset",
    "segment",
    "split_by_subject",
    "split_kfold",
    "synthetic_frameset",
    "unflatten_frame",
    "write_cache",
    "write_csv",
    "write_edf",
]
