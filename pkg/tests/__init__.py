"""Test suite for szbench."""
