"""Unit tests for szbench."""
