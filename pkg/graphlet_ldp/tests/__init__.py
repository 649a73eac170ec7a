"""Unit tests for the graphlet LDP package."""
