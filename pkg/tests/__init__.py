"""Test suite for reach-bounds."""
