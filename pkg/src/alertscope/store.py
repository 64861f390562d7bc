"""Indexed alert store: ingest, exclusions, grid/facet/histogram queries, export.

Alerts are held column-wise in numpy arrays (one row per alert plus a CSR
event table), so every aggregation is a masked count over int columns —
see kernels.py for the two counting backends. Writers (ingest,
set_exclusions) swap an immutable snapshot under a lock; readers query
whatever snapshot they grabbed, so results are always internally consistent.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import kernels, wire
from .errors import EmptySelectionError, HandleError, ParseError, SpecError
from .model import (
    Activity,
    Alert,
    Event,
    ExclusionSet,
    ResourceKind,
    ResourceType,
    TimeRange,
    parse_resource,
    validate_alert,
)

SECONDS_PER_DAY = 86400
TOTALS_KEY = "__totals__"

# Monday-start ISO weeks; 1970-01-05 (day index 4) was a Monday.
_EPOCH_MONDAY = 4

_RESOURCE_TYPES = tuple(ResourceType)
_ACTIVITIES = tuple(Activity)
_RESOURCE_TYPE_CODE = {v: i for i, v in enumerate(_RESOURCE_TYPES)}
_ACTIVITY_CODE = {v: i for i, v in enumerate(_ACTIVITIES)}

FACET_ATTRS = (
    "user",
    "policy",
    "resource",
    "resource_type",
    "activity",
    "endpoint",
    "application",
    "alert_hour",
    "event_count",
)
COLOR_ATTRS = FACET_ATTRS + ("severity", "alert_time")
_CONTINUOUS_ATTRS = frozenset({"alert_hour", "event_count", "severity", "alert_time"})

CSV_HEADER = (
    "user,endpoint,application,resource,resource_type,activity,"
    "policy_id,severity,alert_time,event_count"
)

# user*day bin budget above which pair counting switches to the sparse path
_DENSE_PAIR_LIMIT = 4_000_000


class GridView(str, Enum):
    CALENDAR = "Calendar"
    DAILY_TOP_USERS = "DailyTopUsers"
    HISTORIC_TOP_USERS = "HistoricTopUsers"
    SINGLE_USER_CALENDAR = "SingleUserCalendar"
    DAILY_TOP_USERS_BY_POLICY = "DailyTopUsersByPolicy"
    TWENTY_FOUR_HOURS_BY_POLICY = "TwentyFourHoursByPolicy"
    TARGETED_CALENDAR = "TargetedCalendar"


_SINGLE_DAY_VIEWS = {
    GridView.DAILY_TOP_USERS,
    GridView.DAILY_TOP_USERS_BY_POLICY,
    GridView.TWENTY_FOUR_HOURS_BY_POLICY,
}

_DEFAULT_TOP_N = {
    GridView.DAILY_TOP_USERS: 300,
    GridView.HISTORIC_TOP_USERS: 300,
    GridView.DAILY_TOP_USERS_BY_POLICY: 50,
}


@dataclass(frozen=True)
class GridSpec:
    view: GridView
    range: TimeRange
    focus_user: str | None = None
    focus_resources: tuple[str, ...] | None = None
    policy_filter: tuple[str, ...] | None = None
    top_n: int | None = None
    offset: int = 0

    def resolved_top_n(self) -> int:
        if self.top_n is not None:
            if self.top_n <= 0:
                raise SpecError("top_n must be positive")
            return self.top_n
        return _DEFAULT_TOP_N.get(self.view, 300)

    def to_json(self) -> dict:
        return {
            "view": self.view.value,
            "start": wire.ts_to_iso(self.range.start),
            "end": wire.ts_to_iso(self.range.end),
            "focus_user": self.focus_user,
            "focus_resources": list(self.focus_resources) if self.focus_resources else None,
            "policy_filter": list(self.policy_filter) if self.policy_filter else None,
            "top_n": self.top_n,
            "offset": self.offset,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GridSpec":
        try:
            return cls(
                view=GridView(obj["view"]),
                range=TimeRange(wire.iso_to_ts(obj["start"]), wire.iso_to_ts(obj["end"])),
                focus_user=obj.get("focus_user") or None,
                focus_resources=tuple(obj["focus_resources"]) if obj.get("focus_resources") else None,
                policy_filter=tuple(obj["policy_filter"]) if obj.get("policy_filter") else None,
                top_n=obj.get("top_n"),
                offset=int(obj.get("offset") or 0),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise SpecError(f"bad grid spec: {exc}") from exc


@dataclass(frozen=True)
class GridCell:
    row_key: str
    col_key: str | None
    alert_count: int
    selection_handle: str


@dataclass(frozen=True)
class GridResult:
    view: GridView
    rows: tuple[str, ...]
    cols: tuple[str, ...] | None
    cells: tuple[GridCell, ...]
    meta: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "view": self.view.value,
            "rows": list(self.rows),
            "cols": list(self.cols) if self.cols is not None else None,
            "cells": [
                {
                    "row": c.row_key,
                    "col": c.col_key,
                    "count": c.alert_count,
                    "handle": c.selection_handle,
                }
                for c in self.cells
            ],
            "meta": self.meta,
        }


@dataclass(frozen=True)
class FacetSpec:
    selection: str | tuple[str, ...]  # handle or explicit alert ids
    x_attr: str
    y_attr: str
    color_attr: str | None = None

    def __post_init__(self) -> None:
        if self.x_attr not in FACET_ATTRS or self.y_attr not in FACET_ATTRS:
            raise SpecError(f"facet axes must be one of {FACET_ATTRS}")
        if self.x_attr == self.y_attr:
            raise SpecError("facet axes must differ")
        if self.color_attr is not None and self.color_attr not in COLOR_ATTRS:
            raise SpecError(f"color attribute must be one of {COLOR_ATTRS}")


@dataclass(frozen=True)
class FacetGroup:
    x_value: str
    y_value: str
    alert_ids: tuple[str, ...]


@dataclass(frozen=True)
class FacetResult:
    groups: tuple[FacetGroup, ...]
    color_attr: str | None
    color_kind: str | None  # "categorical" | "continuous"
    colors: dict[str, object]  # alert_id -> raw color value

    def to_json(self) -> dict:
        return {
            "groups": [
                {"x": g.x_value, "y": g.y_value, "alert_ids": list(g.alert_ids)}
                for g in self.groups
            ],
            "color_attr": self.color_attr,
            "color_kind": self.color_kind,
            "colors": self.colors,
        }


@dataclass
class IngestReport:
    ingested: int = 0
    duplicates: int = 0
    flagged: int = 0
    rejected: list[tuple[str, str]] = field(default_factory=list)


class _Vocab:
    """Bidirectional label <-> int code table."""

    __slots__ = ("labels", "codes")

    def __init__(self) -> None:
        self.labels: list[str] = []
        self.codes: dict[str, int] = {}

    def add(self, label: str) -> int:
        code = self.codes.get(label)
        if code is None:
            code = len(self.labels)
            self.codes[label] = code
            self.labels.append(label)
        return code

    def get(self, label: str) -> int | None:
        return self.codes.get(label)

    def __len__(self) -> int:
        return len(self.labels)


class _ResourceIndex:
    """Permissive-match structure over the resource vocabulary.

    Every resource code gets a permissive class id: filepaths share a class
    per filename segment, USB descriptors per GUID-overlap connected
    component, everything else is a singleton. Class representatives are the
    lexicographically smallest member raw string.
    """

    def __init__(self, resources: _Vocab) -> None:
        n = len(resources)
        self.refs = [parse_resource(raw) for raw in resources.labels]
        self.kind = np.array(
            [0 if r.kind is ResourceKind.FILEPATH else 1 if r.kind is ResourceKind.USB_DESCRIPTOR else 2
             for r in self.refs],
            dtype=np.int8,
        ) if n else np.zeros(0, dtype=np.int8)
        self.segment_members: dict[str, list[int]] = {}
        self.guid_members: dict[str, list[int]] = {}
        for code, ref in enumerate(self.refs):
            if ref.kind is ResourceKind.FILEPATH:
                self.segment_members.setdefault(ref.filename_segment, []).append(code)
            elif ref.kind is ResourceKind.USB_DESCRIPTOR:
                for guid in ref.guids:
                    self.guid_members.setdefault(guid, []).append(code)
        # Union-find over USB descriptors sharing any GUID.
        parent = list(range(n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for members in self.guid_members.values():
            head = members[0]
            for other in members[1:]:
                ra, rb = find(head), find(other)
                if ra != rb:
                    parent[rb] = ra
        self.perm_class = np.empty(n, dtype=np.int32)
        class_of: dict[object, int] = {}
        self.class_members: list[list[int]] = []
        for code, ref in enumerate(self.refs):
            if ref.kind is ResourceKind.FILEPATH:
                key: object = ("seg", ref.filename_segment)
            elif ref.kind is ResourceKind.USB_DESCRIPTOR:
                key = ("usb", find(code))
            else:
                key = ("raw", ref.raw)
            cid = class_of.get(key)
            if cid is None:
                cid = len(self.class_members)
                class_of[key] = cid
                self.class_members.append([])
            self.perm_class[code] = cid
            self.class_members[cid].append(code)

    def class_representative(self, cid: int, resources: _Vocab) -> str:
        return min(resources.labels[c] for c in self.class_members[cid])

    def codes_matching(self, ref, permissive: bool, resources: _Vocab) -> list[int]:
        """Resource codes matching an externally supplied ref."""
        exact = resources.get(ref.raw)
        if not permissive:
            return [exact] if exact is not None else []
        if ref.kind is ResourceKind.FILEPATH:
            return list(self.segment_members.get(ref.filename_segment, []))
        if ref.kind is ResourceKind.USB_DESCRIPTOR:
            codes: set[int] = set()
            for guid in ref.guids:
                for code in self.guid_members.get(guid, []):
                    codes.update(self.class_members[self.perm_class[code]])
            if exact is not None:
                codes.update(self.class_members[self.perm_class[exact]])
            return sorted(codes)
        return [exact] if exact is not None else []


class _Snapshot:
    """Immutable columnar view of the store at one epoch."""

    def __init__(self, builder: "_Builder", exclusions: ExclusionSet, epoch: int) -> None:
        self.epoch = epoch
        self.exclusions = exclusions
        self.n = len(builder.alert_ids)
        self.alert_ids = builder.alert_ids
        self.id_to_row = builder.id_to_row
        self.users = builder.users
        self.endpoints = builder.endpoints
        self.applications = builder.applications
        self.resources = builder.resources
        self.policies = builder.policies
        self.policy_severity = dict(builder.policy_severity)

        as_array = np.asarray
        self.time = as_array(builder.time, dtype=np.int64)
        self.day = (self.time // SECONDS_PER_DAY).astype(np.int32)
        self.hour = ((self.time % SECONDS_PER_DAY) // 3600).astype(np.int32)
        weekday = (self.day + 3) % 7
        self.week = ((self.day - weekday - _EPOCH_MONDAY) // 7).astype(np.int32)
        self.user = as_array(builder.user, dtype=np.int32)
        self.policy = as_array(builder.policy, dtype=np.int32)
        self.severity = as_array(builder.severity, dtype=np.int32)
        self.event_count = as_array(builder.event_count, dtype=np.int32)
        self.endpoint = as_array(builder.endpoint, dtype=np.int32)
        self.application = as_array(builder.application, dtype=np.int32)
        self.first_resource = as_array(builder.first_resource, dtype=np.int32)
        self.first_rtype = as_array(builder.first_rtype, dtype=np.int32)
        self.first_activity = as_array(builder.first_activity, dtype=np.int32)
        self.flagged = as_array(builder.flagged, dtype=np.uint8)

        self.ev_offsets = np.concatenate(
            [[0], np.cumsum(self.event_count, dtype=np.int64)]
        ) if self.n else np.zeros(1, dtype=np.int64)
        self.ev_row = as_array(builder.ev_row, dtype=np.int32)
        self.ev_ids = builder.ev_ids
        self.ev_resource = as_array(builder.ev_resource, dtype=np.int32)
        self.ev_rtype = as_array(builder.ev_rtype, dtype=np.int32)
        self.ev_activity = as_array(builder.ev_activity, dtype=np.int32)
        self.ev_start = as_array(builder.ev_start, dtype=np.int64)
        self.ev_end = as_array(builder.ev_end, dtype=np.int64)

        self.resource_index = _ResourceIndex(self.resources)
        self.ones_rows = np.ones(self.n, dtype=np.uint8)
        self.ones_users = np.ones(max(len(self.users), 1), dtype=np.uint8)
        self.ones_policies = np.ones(max(len(self.policies), 1), dtype=np.uint8)
        self.excluded = self._excluded_mask(exclusions)

    def with_exclusions(self, exclusions: ExclusionSet, epoch: int) -> "_Snapshot":
        """Same columns and indexes, different cleaning clauses."""
        clone = object.__new__(_Snapshot)
        clone.__dict__.update(self.__dict__)
        clone.exclusions = exclusions
        clone.epoch = epoch
        clone.excluded = clone._excluded_mask(exclusions)
        return clone

    def _excluded_mask(self, exclusions: ExclusionSet) -> np.ndarray:
        out = np.zeros(self.n, dtype=bool)
        if self.n == 0:
            return out.astype(np.uint8)
        if exclusions.excluded_users:
            codes = [
                c for u in exclusions.excluded_users if (c := self.users.get(u)) is not None
            ]
            if codes:
                lut = np.zeros(len(self.users), dtype=bool)
                lut[codes] = True
                out |= lut[self.user]
        for r in exclusions.excluded_ranges:
            out |= (self.time >= r.start) & (self.time < r.end)
        return out.astype(np.uint8)

    # -- low-level selection ------------------------------------------------

    def mask(
        self,
        t0: int,
        t1: int,
        user_lut: np.ndarray | None = None,
        policy_lut: np.ndarray | None = None,
        row_flag: np.ndarray | None = None,
    ) -> np.ndarray:
        return kernels.selection_mask(
            self.time,
            np.int64(t0),
            np.int64(t1),
            self.excluded,
            self.user,
            user_lut if user_lut is not None else self.ones_users,
            self.policy,
            policy_lut if policy_lut is not None else self.ones_policies,
            row_flag if row_flag is not None else self.ones_rows,
        )

    def user_lut(self, labels: Iterable[str]) -> np.ndarray:
        lut = np.zeros(max(len(self.users), 1), dtype=np.uint8)
        for label in labels:
            code = self.users.get(label)
            if code is not None:
                lut[code] = 1
        return lut

    def policy_lut(self, policy_ids: Iterable[str]) -> np.ndarray:
        lut = np.zeros(max(len(self.policies), 1), dtype=np.uint8)
        for pid in policy_ids:
            code = self.policies.get(pid)
            if code is not None:
                lut[code] = 1
        return lut

    def resource_row_flag(self, resource_codes: Sequence[int]) -> np.ndarray:
        lut = np.zeros(max(len(self.resources), 1), dtype=np.uint8)
        for code in resource_codes:
            lut[code] = 1
        return kernels.flag_rows_with_any(self.ev_row, self.ev_resource, lut, self.n)

    def alert_at(self, row: int) -> Alert:
        lo, hi = int(self.ev_offsets[row]), int(self.ev_offsets[row + 1])
        user = self.users.labels[self.user[row]]
        endpoint = self.endpoints.labels[self.endpoint[row]]
        application = self.applications.labels[self.application[row]]
        events = tuple(
            Event(
                event_id=self.ev_ids[j],
                user=user,
                endpoint=endpoint,
                application=application,
                resource=self.resources.labels[self.ev_resource[j]],
                resource_type=_RESOURCE_TYPES[self.ev_rtype[j]],
                activity=_ACTIVITIES[self.ev_activity[j]],
                start_time=int(self.ev_start[j]),
                end_time=int(self.ev_end[j]),
            )
            for j in range(lo, hi)
        )
        return Alert(
            alert_id=self.alert_ids[row],
            alert_time=int(self.time[row]),
            policy_id=self.policies.labels[self.policy[row]],
            severity=int(self.severity[row]),
            events=events,
        )


class _Builder:
    """Accumulates ingested alerts as plain lists until a snapshot is cut."""

    def __init__(self) -> None:
        self.alert_ids: list[str] = []
        self.id_to_row: dict[str, int] = {}
        self.users = _Vocab()
        self.endpoints = _Vocab()
        self.applications = _Vocab()
        self.resources = _Vocab()
        self.policies = _Vocab()
        self.policy_severity: dict[int, int] = {}
        self.time: list[int] = []
        self.user: list[int] = []
        self.policy: list[int] = []
        self.severity: list[int] = []
        self.event_count: list[int] = []
        self.endpoint: list[int] = []
        self.application: list[int] = []
        self.first_resource: list[int] = []
        self.first_rtype: list[int] = []
        self.first_activity: list[int] = []
        self.flagged: list[int] = []
        self.ev_row: list[int] = []
        self.ev_ids: list[str] = []
        self.ev_resource: list[int] = []
        self.ev_rtype: list[int] = []
        self.ev_activity: list[int] = []
        self.ev_start: list[int] = []
        self.ev_end: list[int] = []

    def append(self, alert: Alert, flagged: bool) -> None:
        row = len(self.alert_ids)
        self.id_to_row[alert.alert_id] = row
        self.alert_ids.append(alert.alert_id)
        first = alert.events[0]
        self.time.append(alert.alert_time)
        self.user.append(self.users.add(first.user))
        policy_code = self.policies.add(alert.policy_id)
        self.policy.append(policy_code)
        self.policy_severity.setdefault(policy_code, alert.severity)
        self.severity.append(alert.severity)
        self.event_count.append(len(alert.events))
        self.endpoint.append(self.endpoints.add(first.endpoint))
        self.application.append(self.applications.add(first.application))
        for idx, event in enumerate(alert.events):
            code = self.resources.add(event.resource)
            rtype = _RESOURCE_TYPE_CODE[event.resource_type]
            activity = _ACTIVITY_CODE[event.activity]
            if idx == 0:
                self.first_resource.append(code)
                self.first_rtype.append(rtype)
                self.first_activity.append(activity)
            self.ev_row.append(row)
            self.ev_ids.append(event.event_id)
            self.ev_resource.append(code)
            self.ev_rtype.append(rtype)
            self.ev_activity.append(activity)
            self.ev_start.append(event.start_time)
            self.ev_end.append(event.end_time)
        self.flagged.append(1 if flagged else 0)


def _cap_only(violations: list[str]) -> bool:
    return bool(violations) and all(v.startswith("event count exceeds") for v in violations)


class AlertStore:
    """Queryable alert collection with cleaning clauses applied to every query."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._builder = _Builder()
        self._exclusions = ExclusionSet()
        self._epoch = 0
        self._snap = _Snapshot(self._builder, self._exclusions, self._epoch)
        self._handles: dict[str, dict] = {}

    # -- writes ---------------------------------------------------------

    def ingest(self, records: Iterable[dict | Alert]) -> IngestReport:
        """Add alert records; idempotent on alert_id.

        Records failing validation are rejected individually, except for
        pre-cap bundles whose only defect is the event cap: those are kept
        (flagged) so that cleaning filters can be exercised against them.
        """
        report = IngestReport()
        with self._lock:
            for index, record in enumerate(records):
                if isinstance(record, Alert):
                    alert = record
                else:
                    try:
                        alert = wire.alert_from_json(record)
                    except ParseError as exc:
                        report.rejected.append((f"record[{index}]", str(exc)))
                        continue
                if alert.alert_id in self._builder.id_to_row:
                    report.duplicates += 1
                    continue
                violations = validate_alert(alert)
                flagged = _cap_only(violations)
                if violations and not flagged:
                    report.rejected.append((alert.alert_id, "; ".join(violations)))
                    continue
                self._builder.append(alert, flagged)
                report.ingested += 1
                if flagged:
                    report.flagged += 1
            self._epoch += 1
            self._snap = _Snapshot(self._builder, self._exclusions, self._epoch)
        return report

    def set_exclusions(self, exclusions: ExclusionSet) -> None:
        with self._lock:
            self._exclusions = exclusions
            self._epoch += 1
            self._snap = self._snap.with_exclusions(exclusions, self._epoch)

    # -- introspection ----------------------------------------------------

    def snapshot(self) -> _Snapshot:
        return self._snap

    @property
    def exclusions(self) -> ExclusionSet:
        return self._exclusions

    def total_alerts(self, include_excluded: bool = False) -> int:
        snap = self._snap
        if include_excluded:
            return snap.n
        return int(snap.n - int(snap.excluded.sum()))

    # -- handles ----------------------------------------------------------

    def _register(self, desc: dict) -> str:
        desc = dict(desc)
        desc["epoch"] = self._snap.epoch
        digest = hashlib.sha1(
            json.dumps(desc, sort_keys=True, separators=(",", ":")).encode()
        ).hexdigest()
        handle = f"h{digest[:16]}"
        self._handles[handle] = desc
        return handle

    def _resolve_rows(self, handle: str) -> tuple[_Snapshot, np.ndarray]:
        desc = self._handles.get(handle)
        if desc is None:
            raise HandleError(f"unknown selection handle {handle!r}")
        snap = self._snap
        if desc.get("epoch") != snap.epoch:
            raise HandleError(f"stale selection handle {handle!r}: store changed")
        user_lut = None
        if desc.get("user") is not None:
            user_lut = snap.user_lut([desc["user"]])
        elif desc.get("users") is not None:
            user_lut = snap.user_lut(desc["users"])
        policy_lut = None
        if desc.get("policy") is not None:
            policy_lut = snap.policy_lut([desc["policy"]])
        elif desc.get("policies") is not None:
            policy_lut = snap.policy_lut(desc["policies"])
        row_flag = None
        if desc.get("resources") is not None:
            codes: list[int] = []
            for raw in desc["resources"]:
                code = snap.resources.get(raw)
                if code is not None:
                    codes.append(code)
            row_flag = snap.resource_row_flag(codes)
        elif desc.get("resource_codes") is not None:
            row_flag = snap.resource_row_flag(desc["resource_codes"])
        mask = snap.mask(desc["t0"], desc["t1"], user_lut, policy_lut, row_flag)
        rows = np.nonzero(mask)[0]
        if desc.get("hour") is not None:
            rows = rows[snap.hour[rows] == desc["hour"]]
        return snap, rows

    def fetch_alerts(self, handle: str) -> list[Alert]:
        """Exact alert set behind a grid/graph cell, sorted by alert time."""
        snap, rows = self._resolve_rows(handle)
        order = np.argsort(snap.time[rows], kind="stable")
        return [snap.alert_at(int(r)) for r in rows[order]]

    def resolve_selection(self, selection: str | Sequence[str]) -> tuple[_Snapshot, np.ndarray]:
        """Selection = handle string or explicit alert-id list -> rows."""
        if isinstance(selection, str):
            return self._resolve_rows(selection)
        snap = self._snap
        rows = []
        for alert_id in selection:
            row = snap.id_to_row.get(alert_id)
            if row is None:
                raise HandleError(f"unknown alert id {alert_id!r}")
            rows.append(row)
        return snap, np.asarray(sorted(set(rows)), dtype=np.int64)

    # -- queries ----------------------------------------------------------

    def weekly_histogram(self) -> list[dict]:
        """Alert counts per ISO week (Monday start, UTC) over the stored
        non-excluded range, zero-count weeks included."""
        snap = self._snap
        mask = snap.mask(np.iinfo(np.int64).min, np.iinfo(np.int64).max)
        if not mask.any():
            return []
        weeks = snap.week[mask.view(bool)]
        w0, w1 = int(weeks.min()), int(weeks.max())
        counts = kernels.count_masked(snap.week, mask, w0, w1 - w0 + 1)
        out = []
        for i, count in enumerate(counts):
            monday_day = (w0 + i) * 7 + _EPOCH_MONDAY
            out.append(
                {
                    "week_start": wire.ts_to_iso(monday_day * SECONDS_PER_DAY)[:10],
                    "alert_count": int(count),
                }
            )
        return out

    def grid(self, spec: GridSpec) -> GridResult:
        snap = self._snap
        view = spec.view
        t0, t1 = spec.range.start, spec.range.end
        if view in _SINGLE_DAY_VIEWS:
            if t1 - t0 != SECONDS_PER_DAY or t0 % SECONDS_PER_DAY != 0:
                raise SpecError(f"{view.value} requires a UTC-aligned one-day range")
        if view is GridView.SINGLE_USER_CALENDAR and not spec.focus_user:
            raise SpecError("SingleUserCalendar requires focus_user")
        if view is GridView.TARGETED_CALENDAR and not (spec.focus_user or spec.focus_resources):
            raise SpecError("TargetedCalendar requires focus users or resources")

        filters: dict = {"t0": int(t0), "t1": int(t1)}
        user_lut = policy_lut = row_flag = None
        if spec.policy_filter:
            policy_lut = snap.policy_lut(spec.policy_filter)
            filters["policies"] = sorted(spec.policy_filter)
        if view in (GridView.SINGLE_USER_CALENDAR, GridView.TARGETED_CALENDAR) and spec.focus_user:
            user_lut = snap.user_lut([spec.focus_user])
            filters["user"] = spec.focus_user
        if view is GridView.TARGETED_CALENDAR and spec.focus_resources:
            codes = [
                c for raw in spec.focus_resources if (c := snap.resources.get(raw)) is not None
            ]
            row_flag = snap.resource_row_flag(codes)
            filters["resources"] = sorted(spec.focus_resources)
        mask = snap.mask(t0, t1, user_lut, policy_lut, row_flag)

        if view in (GridView.CALENDAR, GridView.SINGLE_USER_CALENDAR, GridView.TARGETED_CALENDAR):
            return self._per_day_grid(snap, spec, mask, filters)
        if view is GridView.DAILY_TOP_USERS:
            return self._daily_top_users(snap, spec, mask, filters)
        if view is GridView.HISTORIC_TOP_USERS:
            return self._historic_top_users(snap, spec, mask, filters)
        if view is GridView.DAILY_TOP_USERS_BY_POLICY:
            return self._daily_top_users_by_policy(snap, spec, mask, filters)
        if view is GridView.TWENTY_FOUR_HOURS_BY_POLICY:
            return self._hours_by_policy(snap, spec, mask, filters)
        raise SpecError(f"unhandled view {view}")  # pragma: no cover

    def _day_cells(self, snap, mask, filters, t0: int, t1: int) -> tuple[tuple[str, ...], list[GridCell]]:
        d0 = t0 // SECONDS_PER_DAY
        d1 = (t1 - 1) // SECONDS_PER_DAY
        counts = kernels.count_masked(snap.day, mask, d0, d1 - d0 + 1)
        rows = []
        cells = []
        for i, count in enumerate(counts):
            day = d0 + i
            key = wire.ts_to_iso(day * SECONDS_PER_DAY)[:10]
            rows.append(key)
            desc = dict(filters)
            desc["t0"] = max(t0, day * SECONDS_PER_DAY)
            desc["t1"] = min(t1, (day + 1) * SECONDS_PER_DAY)
            cells.append(GridCell(key, None, int(count), self._register(desc)))
        return tuple(rows), cells

    def _per_day_grid(self, snap, spec, mask, filters) -> GridResult:
        rows, cells = self._day_cells(snap, mask, filters, spec.range.start, spec.range.end)
        return GridResult(
            view=spec.view,
            rows=rows,
            cols=None,
            cells=tuple(cells),
            meta={"ordering": "day ascending"},
        )

    @staticmethod
    def _top_codes(counts: np.ndarray, labels: list[str], top_n: int, offset: int) -> list[int]:
        nonzero = np.nonzero(counts)[0]
        ranked = sorted(nonzero, key=lambda c: (-int(counts[c]), labels[c]))
        return [int(c) for c in ranked[offset : offset + top_n]]

    def _daily_top_users(self, snap, spec, mask, filters) -> GridResult:
        counts = kernels.count_masked(snap.user, mask, 0, max(len(snap.users), 1))
        chosen = self._top_codes(counts, snap.users.labels, spec.resolved_top_n(), spec.offset)
        cells = []
        for code in chosen:
            label = snap.users.labels[code]
            desc = dict(filters)
            desc["user"] = label
            cells.append(GridCell(label, None, int(counts[code]), self._register(desc)))
        return GridResult(
            view=spec.view,
            rows=tuple(c.row_key for c in cells),
            cols=None,
            cells=tuple(cells),
            meta={"ordering": "alert count descending, user ascending"},
        )

    def _historic_top_users(self, snap, spec, mask, filters) -> GridResult:
        d0 = spec.range.start // SECONDS_PER_DAY
        d1 = (spec.range.end - 1) // SECONDS_PER_DAY
        n_days = d1 - d0 + 1
        n_users = max(len(snap.users), 1)
        pairs: list[tuple[int, int, int]] = []  # (count, user_code, day)
        if n_users * n_days <= _DENSE_PAIR_LIMIT:
            dense = kernels.count_pairs_dense(
                snap.user, 0, n_users, snap.day, d0, n_days, mask
            )
            for key in np.nonzero(dense)[0]:
                pairs.append((int(dense[key]), int(key) // n_days, d0 + int(key) % n_days))
        else:
            keys = kernels.pair_keys_masked(snap.user, 0, snap.day, d0, n_days, mask)
            uniq, counts = np.unique(keys, return_counts=True)
            for key, count in zip(uniq, counts):
                pairs.append((int(count), int(key) // n_days, d0 + int(key) % n_days))
        pairs.sort(key=lambda p: (-p[0], snap.users.labels[p[1]], p[2]))
        top = pairs[spec.offset : spec.offset + spec.resolved_top_n()]
        cells = []
        for count, user_code, day in top:
            label = snap.users.labels[user_code]
            day_key = wire.ts_to_iso(day * SECONDS_PER_DAY)[:10]
            desc = dict(filters)
            desc["user"] = label
            desc["t0"] = max(spec.range.start, day * SECONDS_PER_DAY)
            desc["t1"] = min(spec.range.end, (day + 1) * SECONDS_PER_DAY)
            cells.append(GridCell(label, day_key, count, self._register(desc)))
        return GridResult(
            view=spec.view,
            rows=tuple(c.row_key for c in cells),
            cols=tuple(c.col_key for c in cells if c.col_key),
            cells=tuple(cells),
            meta={"ordering": "alert count descending, user ascending, day ascending"},
        )

    def _policy_rows(self, snap, mask) -> list[int]:
        counts = kernels.count_masked(snap.policy, mask, 0, max(len(snap.policies), 1))
        present = [int(c) for c in np.nonzero(counts)[0]]
        present.sort(key=lambda c: (-snap.policy_severity.get(c, 0), snap.policies.labels[c]))
        return present

    def _daily_top_users_by_policy(self, snap, spec, mask, filters) -> GridResult:
        user_counts = kernels.count_masked(snap.user, mask, 0, max(len(snap.users), 1))
        chosen = self._top_codes(user_counts, snap.users.labels, spec.resolved_top_n(), spec.offset)
        chosen_labels = [snap.users.labels[c] for c in chosen]
        policy_rows = self._policy_rows(snap, mask)
        n_policies = max(len(snap.policies), 1)
        dense = kernels.count_pairs_dense(
            snap.policy, 0, n_policies, snap.user, 0, max(len(snap.users), 1), mask
        )
        n_users = max(len(snap.users), 1)
        cells = []
        grand = 0
        desc_grand = dict(filters)
        desc_grand["users"] = chosen_labels
        for p in policy_rows:
            plabel = snap.policies.labels[p]
            row_total = 0
            for u, ulabel in zip(chosen, chosen_labels):
                count = int(dense[p * n_users + u])
                row_total += count
                desc = dict(filters)
                desc["user"] = ulabel
                desc["policy"] = plabel
                cells.append(GridCell(plabel, ulabel, count, self._register(desc)))
            desc = dict(filters)
            desc["policy"] = plabel
            desc["users"] = chosen_labels
            cells.append(GridCell(plabel, TOTALS_KEY, row_total, self._register(desc)))
            grand += row_total
        for u, ulabel in zip(chosen, chosen_labels):
            desc = dict(filters)
            desc["user"] = ulabel
            cells.append(GridCell(TOTALS_KEY, ulabel, int(user_counts[u]), self._register(desc)))
        cells.append(GridCell(TOTALS_KEY, TOTALS_KEY, grand, self._register(desc_grand)))
        return GridResult(
            view=spec.view,
            rows=(TOTALS_KEY, *(snap.policies.labels[p] for p in policy_rows)),
            cols=(TOTALS_KEY, *chosen_labels),
            meta={
                "ordering": "rows by policy severity descending, columns by alert count descending",
                "row_severity": {
                    snap.policies.labels[p]: int(snap.policy_severity.get(p, 0))
                    for p in policy_rows
                },
            },
            cells=tuple(cells),
        )

    def _hours_by_policy(self, snap, spec, mask, filters) -> GridResult:
        policy_rows = self._policy_rows(snap, mask)
        n_policies = max(len(snap.policies), 1)
        dense = kernels.count_pairs_dense(snap.policy, 0, n_policies, snap.hour, 0, 24, mask)
        cells = []
        for p in policy_rows:
            plabel = snap.policies.labels[p]
            for h in range(24):
                desc = dict(filters)
                desc["policy"] = plabel
                desc["hour"] = h
                cells.append(
                    GridCell(plabel, f"{h:02d}", int(dense[p * 24 + h]), self._register(desc))
                )
        return GridResult(
            view=spec.view,
            rows=tuple(snap.policies.labels[p] for p in policy_rows),
            cols=tuple(f"{h:02d}" for h in range(24)),
            meta={
                "ordering": "rows by policy severity descending, hours ascending",
                "row_severity": {
                    snap.policies.labels[p]: int(snap.policy_severity.get(p, 0))
                    for p in policy_rows
                },
            },
            cells=tuple(cells),
        )

    # -- facet / export ----------------------------------------------------

    def facet(self, spec: FacetSpec) -> FacetResult:
        snap, rows = self.resolve_selection(spec.selection)
        if len(rows) == 0:
            raise EmptySelectionError("facet selection is empty")
        order = rows[np.argsort(snap.time[rows], kind="stable")]
        x_values = self._facet_values(snap, order, spec.x_attr)
        y_values = self._facet_values(snap, order, spec.y_attr)
        grouped: dict[tuple[str, str], list[str]] = {}
        for row, x, y in zip(order, x_values, y_values):
            grouped.setdefault((x, y), []).append(snap.alert_ids[int(row)])
        groups = tuple(
            FacetGroup(x, y, tuple(ids))
            for (x, y), ids in sorted(grouped.items(), key=lambda kv: kv[0])
        )
        colors: dict[str, object] = {}
        color_kind = None
        if spec.color_attr:
            color_kind = "continuous" if spec.color_attr in _CONTINUOUS_ATTRS else "categorical"
            for row, value in zip(order, self._color_values(snap, order, spec.color_attr)):
                colors[snap.alert_ids[int(row)]] = value
        return FacetResult(groups=groups, color_attr=spec.color_attr, color_kind=color_kind, colors=colors)

    def _facet_values(self, snap, rows, attr: str) -> list[str]:
        if attr == "user":
            return [snap.users.labels[snap.user[r]] for r in rows]
        if attr == "policy":
            return [snap.policies.labels[snap.policy[r]] for r in rows]
        if attr == "endpoint":
            return [snap.endpoints.labels[snap.endpoint[r]] for r in rows]
        if attr == "application":
            return [snap.applications.labels[snap.application[r]] for r in rows]
        if attr == "resource":
            # multi-valued across bundled events: group by the first event's value
            return [snap.resources.labels[snap.first_resource[r]] for r in rows]
        if attr == "resource_type":
            return [_RESOURCE_TYPES[snap.first_rtype[r]].value for r in rows]
        if attr == "activity":
            return [_ACTIVITIES[snap.first_activity[r]].value for r in rows]
        if attr == "alert_hour":
            return [str(int(snap.hour[r])) for r in rows]
        if attr == "event_count":
            return [str(int(snap.event_count[r])) for r in rows]
        raise SpecError(f"unknown facet attribute {attr!r}")

    def _color_values(self, snap, rows, attr: str) -> list[object]:
        if attr == "severity":
            return [int(snap.severity[r]) for r in rows]
        if attr == "alert_time":
            return [wire.ts_to_iso(int(snap.time[r])) for r in rows]
        if attr == "alert_hour":
            return [int(snap.hour[r]) for r in rows]
        if attr == "event_count":
            return [int(snap.event_count[r]) for r in rows]
        return self._facet_values(snap, rows, attr)

    def export(self, handle: str, format: str) -> Iterator[bytes]:
        """Stream a cell's alerts as JSONL or flattened CSV."""
        if format not in ("jsonl", "csv"):
            raise SpecError(f"unknown export format {format!r}")
        snap, rows = self._resolve_rows(handle)
        order = rows[np.argsort(snap.time[rows], kind="stable")]
        if format == "jsonl":
            for row in order:
                alert = snap.alert_at(int(row))
                yield (json.dumps(wire.alert_to_json(alert), separators=(",", ":")) + "\n").encode()
            return
        yield (CSV_HEADER + "\r\n").encode()
        for row in order:
            alert = snap.alert_at(int(row))
            first = alert.events[0]
            buf = io.StringIO()
            csv.writer(buf).writerow(
                [
                    first.user,
                    first.endpoint,
                    first.application,
                    first.resource,
                    first.resource_type.value,
                    first.activity.value,
                    alert.policy_id,
                    alert.severity,
                    wire.ts_to_iso(alert.alert_time),
                    len(alert.events),
                ]
            )
            yield buf.getvalue().encode()
