"""Exception types raised across the pipeline.

Unresolved endpoints, HIL candidates and nonconforming hostnames are *values*,
never exceptions; only structural problems (bad input files, impossible
requests, transport failure with no stored fallback) raise.
"""

from __future__ import annotations


class BodyError(Exception):
    """Base class for every error this package raises on purpose."""


class MalformedMac(BodyError):
    def __init__(self, raw: str):
        super().__init__(f"not a MAC address in any accepted format: {raw!r}")
        self.raw = raw


class DuplicateMac(BodyError):
    def __init__(self, mac: str, context: str = ""):
        detail = f" ({context})" if context else ""
        super().__init__(f"duplicate MAC in registry: {mac}{detail}")
        self.mac = mac


class MalformedLine(BodyError):
    def __init__(self, path: str, line_no: int, reason: str):
        super().__init__(f"{path}:{line_no}: {reason}")
        self.path = path
        self.line_no = line_no
        self.reason = reason


class DuplicateSwitch(BodyError):
    def __init__(self, switch_id: str):
        super().__init__(f"switch listed more than once in topo map: {switch_id}")
        self.switch_id = switch_id


class OrphanServer(BodyError):
    def __init__(self, server_id: str, parent: str):
        super().__init__(f"server {server_id} names unknown parent switch {parent}")
        self.server_id = server_id
        self.parent = parent


class UnknownDialect(BodyError):
    def __init__(self, name: str):
        super().__init__(f"unknown CLI dialect: {name!r}")
        self.name = name


class ParseFailure(BodyError):
    """A transcript section is structurally unreadable (not a skippable row)."""

    def __init__(self, section: str, line_no: int, reason: str):
        super().__init__(f"{section} transcript unreadable at line {line_no}: {reason}")
        self.section = section
        self.line_no = line_no
        self.reason = reason


class TransportUnavailable(BodyError):
    def __init__(self, switch_id: str, reason: str = ""):
        detail = f": {reason}" if reason else ""
        super().__init__(f"no transport session for {switch_id}{detail}")
        self.switch_id = switch_id


class MissingProfile(BodyError):
    def __init__(self, switch_id: str):
        super().__init__(f"no persisted profile for switch {switch_id}")
        self.switch_id = switch_id


class AmbiguousUplink(BodyError):
    """MAC-density fallback tied; uplink choice needs a human."""

    def __init__(self, switch_id: str, ports: list[str]):
        super().__init__(
            f"uplink ambiguous on {switch_id}: ports {', '.join(ports)} tie on MAC count"
        )
        self.switch_id = switch_id
        self.ports = ports


class MalformedFeed(BodyError):
    def __init__(self, reason: str):
        super().__init__(f"verdict feed rejected: {reason}")
        self.reason = reason


class SwitchSetMismatch(BodyError):
    def __init__(self, missing: list[str], unexpected: list[str]):
        super().__init__(
            f"inferred and ground-truth switch sets differ "
            f"(missing: {missing or '-'}, unexpected: {unexpected or '-'})"
        )
        self.missing = missing
        self.unexpected = unexpected


class InvalidProfile(BodyError):
    """A SwitchProfile violates one of its structural invariants."""


class ConfigError(BodyError):
    """Bad CLI configuration (exit code 2)."""
