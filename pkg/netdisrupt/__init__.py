"""netdisrupt - Bounds on the social disruption a policy causes in two-arm network experiments."""

__version__ = "0.1.0"
