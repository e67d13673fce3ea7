"""Tests for sbm2d."""
