"""Flexible job-shop scheduling on a chronological discrete-event simulator."""

from .dispatch import JobRule, MachineRule, decode_action, encode_action, select_job, select_machine
from .env import FJSPEnv, rollout
from .instance import OpTable, RawInstance, build_table, load_instance, parse_instance, serialize_instance
from .schedule import Entry, Schedule
from .simulator import Simulator
from .validate import validate_schedule

__all__ = [
    "Entry", "FJSPEnv", "JobRule", "MachineRule", "OpTable", "RawInstance", "Schedule",
    "Simulator", "build_table", "decode_action", "encode_action", "load_instance",
    "parse_instance", "rollout", "select_job", "select_machine", "serialize_instance",
    "validate_schedule",
]
