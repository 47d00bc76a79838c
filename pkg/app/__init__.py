"""szbench - framework-free EEG schizophrenia classification benchmark."""

__version__ = "0.1.0"
__app_name__ = "szbench"
