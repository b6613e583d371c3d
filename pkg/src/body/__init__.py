"""Deterministic layer-2 topology inference for overlay networks.

Fuses switch MAC forwarding tables, PoE telemetry, LLDP advertisements, OUI
fingerprints and a sovereign DHCP/asset registry into an auditable topology
persisted as a filesystem hierarchy, with health coloring and explicit
human-in-the-loop exposure of everything it cannot resolve.
"""

__version__ = "0.1.0"
