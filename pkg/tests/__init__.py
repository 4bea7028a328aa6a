"""Tests for quasispin."""
