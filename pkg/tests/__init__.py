"""Tests for lrd-prediction."""
