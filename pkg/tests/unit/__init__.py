"""Unit tests for netdisrupt."""
