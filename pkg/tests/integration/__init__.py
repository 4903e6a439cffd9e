"""Integration tests for netdisrupt."""
