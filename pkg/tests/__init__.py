"""Tests for the kleinsim simulator."""
