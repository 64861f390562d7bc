"""Core data model: events, policies, alerts, resource matching and validation.

Everything here is immutable after construction and safe to share between
threads. Timestamps are integer seconds since the Unix epoch, always UTC.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .errors import EmptySelectionError, InvalidResourceError, RangeError

MAX_EVENTS_PER_ALERT = 100

SECONDS_PER_DAY = 86400


class ResourceType(str, Enum):
    FILE = "file"
    USB_DEVICE = "usb_device"
    OTHER = "other"


class Activity(str, Enum):
    CREATE = "create"
    READ = "read"
    UPDATE = "update"
    DELETE = "delete"
    MOUNT = "mount"


class ClauseAttribute(str, Enum):
    USER = "user"
    ENDPOINT = "endpoint"
    APPLICATION = "application"
    RESOURCE = "resource"
    RESOURCE_TYPE = "resource_type"
    ACTIVITY = "activity"
    HOUR_OF_DAY = "hour_of_day"


class ClauseOperator(str, Enum):
    EQUALS = "equals"
    NOT_EQUALS = "not_equals"
    CONTAINS = "contains"
    ONE_OF = "one_of"
    HOUR_IN_RANGE = "hour_in_range"


@dataclass(frozen=True, slots=True)
class Event:
    """One captured user action: who, what, when, where."""

    event_id: str
    user: str
    endpoint: str
    application: str
    resource: str
    resource_type: ResourceType
    activity: Activity
    start_time: int
    end_time: int


@dataclass(frozen=True)
class PolicyClause:
    """A single condition on one event attribute.

    ``value`` is a string for equals/not_equals/contains, a tuple of strings
    for one_of, and an (start_hour, end_hour) pair for hour_in_range.
    """

    attribute: ClauseAttribute
    operator: ClauseOperator
    value: object

    def __post_init__(self) -> None:
        if self.operator is ClauseOperator.HOUR_IN_RANGE:
            if self.attribute is not ClauseAttribute.HOUR_OF_DAY:
                raise ValueError("hour_in_range only applies to hour_of_day")
            lo, hi = self.value  # type: ignore[misc]
            if not (0 <= int(lo) <= 23 and 0 <= int(hi) <= 23):
                raise ValueError("hour values must lie in 0..23")
        elif self.operator is ClauseOperator.ONE_OF:
            object.__setattr__(self, "value", tuple(str(v) for v in self.value))  # type: ignore[union-attr]


@dataclass(frozen=True)
class Policy:
    """A severity-rated rule: a disjunction (OR) of clause conjunctions (AND)."""

    policy_id: str
    name: str
    severity: int
    disjuncts: tuple[tuple[PolicyClause, ...], ...]

    def __post_init__(self) -> None:
        if not 1 <= self.severity <= 5:
            raise ValueError("severity must be in 1..5")
        disjuncts = tuple(tuple(d) for d in self.disjuncts)
        if not disjuncts or any(not d for d in disjuncts):
            raise ValueError("policy needs at least one disjunct, each with at least one clause")
        object.__setattr__(self, "disjuncts", disjuncts)


@dataclass(frozen=True)
class Alert:
    """A policy trigger bundling closely-timed events.

    Construction is deliberately unchecked so that out-of-contract records
    (e.g. historical pre-cap bundles with 100+ events) can still be
    represented; use :func:`validate_alert` to test the invariants.
    """

    alert_id: str
    alert_time: int
    policy_id: str
    severity: int
    events: tuple[Event, ...]


class ResourceKind(str, Enum):
    FILEPATH = "filepath"
    USB_DESCRIPTOR = "usb_descriptor"
    OTHER = "other"


@dataclass(frozen=True)
class ResourceRef:
    """A parsed resource string: a filepath, a USB volume descriptor, or other."""

    kind: ResourceKind
    raw: str
    filename_segment: str = ""
    guids: tuple[str, ...] = ()


@dataclass(frozen=True)
class TimeRange:
    """Half-open span of seconds: start inclusive, end exclusive."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start >= self.end:
            raise RangeError(f"empty time range [{self.start}, {self.end})")

    def contains(self, ts: int) -> bool:
        return self.start <= ts < self.end


@dataclass(frozen=True)
class ExclusionSet:
    """Cleaning clauses applied to every query: time ranges plus user ids.

    Ranges are merged into a disjoint, sorted normal form on construction.
    """

    excluded_ranges: tuple[TimeRange, ...] = ()
    excluded_users: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        object.__setattr__(self, "excluded_ranges", _merge_ranges(self.excluded_ranges))
        object.__setattr__(self, "excluded_users", frozenset(self.excluded_users))

    def excludes(self, alert: Alert) -> bool:
        if alert.events and alert.events[0].user in self.excluded_users:
            return True
        return any(r.contains(alert.alert_time) for r in self.excluded_ranges)


def _merge_ranges(ranges) -> tuple[TimeRange, ...]:
    merged: list[list[int]] = []
    for r in sorted(ranges, key=lambda r: (r.start, r.end)):
        if merged and r.start <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], r.end)
        else:
            merged.append([r.start, r.end])
    return tuple(TimeRange(a, b) for a, b in merged)


# Volume GUID: five hex groups 8-4-4-4-12, optionally brace-wrapped.
_GUID_RE = re.compile(
    r"\{?([0-9a-fA-F]{8}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{12})\}?"
)
_SEPARATORS = "/\\"
_DOT_EXTENSION_RE = re.compile(r"\.[A-Za-z0-9]+$")


def parse_resource(raw: str) -> ResourceRef:
    """Classify a raw resource string.

    USB descriptors are anything containing at least one volume GUID;
    filepaths are strings with a path separator or a trailing dot-extension;
    everything else is opaque. Filename segments are lower-cased so that
    Windows-style paths compare case-insensitively.
    """
    if not raw:
        raise InvalidResourceError("resource string is empty")
    guids = tuple(dict.fromkeys(m.group(1).lower() for m in _GUID_RE.finditer(raw)))
    if guids:
        return ResourceRef(kind=ResourceKind.USB_DESCRIPTOR, raw=raw, guids=guids)
    if any(sep in raw for sep in _SEPARATORS) or _DOT_EXTENSION_RE.search(raw):
        return ResourceRef(
            kind=ResourceKind.FILEPATH, raw=raw, filename_segment=_filename_segment(raw)
        )
    return ResourceRef(kind=ResourceKind.OTHER, raw=raw)


def _filename_segment(raw: str) -> str:
    # Substring after the last separator; trailing separators are ignored so
    # "C:/dir/" yields "dir". All-separator strings fall back to the raw form.
    trimmed = raw.rstrip(_SEPARATORS)
    if not trimmed:
        return raw.lower()
    tail = re.split(r"[/\\]", trimmed)[-1]
    return tail.lower() if tail else trimmed.lower()


def resources_match(a: ResourceRef, b: ResourceRef, permissive: bool = False) -> bool:
    """Resource equivalence: exact raw equality, or the permissive relation.

    Permissive matching compares filepaths by filename segment and USB
    descriptors by GUID-set intersection; any other kind combination falls
    back to exact equality. Symmetric in both arguments.
    """
    if not permissive:
        return a.raw == b.raw
    if a.kind is ResourceKind.FILEPATH and b.kind is ResourceKind.FILEPATH:
        return a.filename_segment == b.filename_segment
    if a.kind is ResourceKind.USB_DESCRIPTOR and b.kind is ResourceKind.USB_DESCRIPTOR:
        return bool(set(a.guids) & set(b.guids))
    return a.raw == b.raw


CONSTANT_ATTRIBUTES = (
    "user",
    "endpoint",
    "application",
    "resource",
    "resource_type",
    "activity",
    "policy_id",
    "severity",
)


def alert_constants(alerts: list[Alert]) -> dict[str, object]:
    """Attributes holding a single shared value across an alert selection.

    Event-level attributes (user, endpoint, application, resource,
    resource_type, activity) must agree across every bundled event of every
    alert; policy_id and severity across the alerts themselves. Attributes
    that vary are absent from the result.
    """
    if not alerts:
        raise EmptySelectionError("alert_constants needs a non-empty selection")
    constants: dict[str, object] = {}
    for attr in ("policy_id", "severity"):
        values = {getattr(a, attr) for a in alerts}
        if len(values) == 1:
            constants[attr] = values.pop()
    for attr in ("user", "endpoint", "application", "resource", "resource_type", "activity"):
        values = {getattr(e, attr) for a in alerts for e in a.events}
        if len(values) == 1:
            value = values.pop()
            constants[attr] = value.value if isinstance(value, Enum) else value
    return constants


def validate_alert(alert: Alert) -> list[str]:
    """Return one description per violated alert invariant; empty when clean."""
    violations: list[str] = []
    n = len(alert.events)
    if n == 0:
        return ["alert bundles no events"]
    if n > MAX_EVENTS_PER_ALERT:
        violations.append(f"event count exceeds {MAX_EVENTS_PER_ALERT} ({n})")
    for attr in ("user", "endpoint", "application"):
        if len({getattr(e, attr) for e in alert.events}) > 1:
            violations.append(f"mixed {attr} across bundled events")
    if alert.alert_time != alert.events[0].start_time:
        violations.append("alert_time differs from first event start_time")
    if any(b.start_time < a.start_time for a, b in zip(alert.events, alert.events[1:])):
        violations.append("events not ordered by start_time")
    return violations


def utc_hour(ts: int) -> int:
    return (ts % SECONDS_PER_DAY) // 3600


def day_index(ts: int) -> int:
    return ts // SECONDS_PER_DAY
