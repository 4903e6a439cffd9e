"""Network readers and result writers."""

from netdisrupt.formats.display import ResultDisplay
from netdisrupt.formats.network_io import IngestOptions, NetworkFormat, load_network, save_network

__all__ = ["IngestOptions", "NetworkFormat", "ResultDisplay", "load_network", "save_network"]
