"""Tests for Axis Deal Engine."""
