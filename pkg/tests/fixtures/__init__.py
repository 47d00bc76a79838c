"""Test fixtures for szbench tests."""
