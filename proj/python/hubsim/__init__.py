"""Python bindings for the hubsim simulator core."""

from ._core import (
    PROTOCOL_VERSION,
    ConfigError,
    DomainError,
    Engine,
    LogError,
    Session,
    batch,
    global_clutter,
    load_scenario,
    make_scenario,
    replay,
    run,
    schedule_probes,
    validate_scenario,
    write_log,
)

__all__ = [
    "PROTOCOL_VERSION",
    "ConfigError",
    "DomainError",
    "Engine",
    "LogError",
    "Session",
    "batch",
    "global_clutter",
    "load_scenario",
    "make_scenario",
    "replay",
    "run",
    "schedule_probes",
    "validate_scenario",
    "write_log",
]
