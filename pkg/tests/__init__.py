"""Test suite for netdisrupt."""
