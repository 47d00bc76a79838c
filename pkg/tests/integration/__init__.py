"""Integration tests for szbench."""
