"""Seeded noise and case-study scenarios injected into a generated corpus.

Each injector appends events (and the alerts they trigger) to a corpus and
records exact ground truth in the manifest, so acceptance checks can assert
precise counts. Noise is injected rather than baked into the base
distribution: clean and dirty corpora stay comparable and cleaning filters
have exact expected values.

Scenario users come from a reserved, never-active tail of the user index
space where exact counts matter; scenario traffic otherwise runs on odd
240-second slots (the base generator uses even ones) so injected runs can
never bleed into a base bundling window.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import wire
from .engine import alert_id_for, detect_stream
from .errors import ConfigError
from .model import (
    Activity,
    Alert,
    ClauseAttribute as CA,
    ClauseOperator as CO,
    Event,
    Policy,
    PolicyClause,
    ResourceType,
)
from .synth import (
    BIN_SECONDS,
    SCENARIO_PARITY,
    SECONDS_PER_DAY,
    Corpus,
    GeneratorConfig,
    _bin_weights,
    schedule_bins,
)

SCENARIO_KINDS = (
    "setup_spike",
    "policy_spike_week",
    "pseudo_account_flood",
    "giant_alerts",
    "wscript_burst",
    "usb_guid_share",
    "autosave_file",
)

# reserved user slots, indexed from the end of the user id space
RESERVED_SLOTS = {
    "autosave_user": 1,
    "wscript_user": 2,
    "usb_focus_user": 3,
    "pseudo_account": 4,
}

MIN_RUN_SPACING = 65  # seconds between sequentially packed runs; > bundling gap


def reserved_user(config: GeneratorConfig, slot: str) -> str:
    return config.user_label(config.user_count - RESERVED_SLOTS[slot])


def reserved_endpoint(config: GeneratorConfig, slot: str) -> str:
    return config.endpoint_label(config.user_count - RESERVED_SLOTS[slot])


@dataclass(frozen=True)
class ScenarioSpec:
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in SCENARIO_KINDS:
            raise ConfigError(f"unknown scenario kind {self.kind!r}")


def default_policies(config: GeneratorConfig) -> list[Policy]:
    """The shipped policy set: base traffic uses the everyday rules, the
    watch-list / staging / service rules only ever fire for scenarios."""
    watchlist = (reserved_user(config, "usb_focus_user"),)
    c = PolicyClause
    return [
        Policy(
            "pol-usb-watch",
            "USB device use by watched account",
            5,
            ((c(CA.USER, CO.ONE_OF, watchlist),
              c(CA.RESOURCE_TYPE, CO.EQUALS, "usb_device"),
              c(CA.ACTIVITY, CO.EQUALS, "mount")),),
        ),
        Policy(
            "pol-script-host",
            "Script host execution",
            4,
            ((c(CA.APPLICATION, CO.EQUALS, "wscript.exe"),),),
        ),
        Policy(
            "pol-late-hours",
            "Restricted content outside working hours",
            3,
            ((c(CA.RESOURCE, CO.CONTAINS, "nsfw"),
              c(CA.HOUR_OF_DAY, CO.HOUR_IN_RANGE, (22, 5))),),
        ),
        Policy(
            "pol-cloud-backup",
            "Cloud backup of working documents",
            3,
            ((c(CA.APPLICATION, CO.EQUALS, "clouddrive.exe"),),),
        ),
        Policy(
            "pol-usb-mount",
            "Removable media mounted",
            2,
            ((c(CA.RESOURCE_TYPE, CO.EQUALS, "usb_device"),
              c(CA.ACTIVITY, CO.EQUALS, "mount")),),
        ),
        Policy(
            "pol-dlp-stage",
            "File classification staging",
            2,
            ((c(CA.APPLICATION, CO.EQUALS, "dlp-scan.exe"),),),
        ),
        Policy(
            "pol-media-files",
            "Media file playback",
            1,
            ((c(CA.RESOURCE, CO.CONTAINS, ".mp3"),),
             (c(CA.RESOURCE, CO.CONTAINS, ".mp4"),)),
        ),
        Policy(
            "pol-svc-sync",
            "Service account synchronisation",
            1,
            ((c(CA.APPLICATION, CO.EQUALS, "sync-agent.exe"),),),
        ),
    ]


def _scenario_rng(corpus: Corpus, kind: str) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence([corpus.config.seed, 1000 + SCENARIO_KINDS.index(kind)])
    )


def _active_users(corpus: Corpus) -> list[str]:
    """Ordinary alerting users: anyone seen in the corpus except the
    reserved scenario accounts (so injected exact counts stay exact)."""
    config = corpus.config
    cutoff = config.user_count - config.reserved_users
    return sorted(
        u for u in {a.events[0].user for a in corpus.alerts} if _user_index(config, u) < cutoff
    )


def _user_index(config: GeneratorConfig, label: str) -> int:
    return int(label[1:])


@dataclass
class _Run:
    start: int
    size: int
    user: str
    endpoint: str
    application: str
    resources: list[str]
    resource_type: ResourceType
    activity: Activity


def _emit(runs: list[_Run], prefix: str) -> list[Event]:
    runs.sort(key=lambda r: r.start)
    events: list[Event] = []
    eid = 0
    for run in runs:
        for i in range(run.size):
            resource = run.resources[i if i < len(run.resources) else -1]
            events.append(
                Event(
                    event_id=f"{prefix}{eid:07d}",
                    user=run.user,
                    endpoint=run.endpoint,
                    application=run.application,
                    resource=resource,
                    resource_type=run.resource_type,
                    activity=run.activity,
                    start_time=run.start + i,
                    end_time=run.start + i,
                )
            )
            eid += 1
    events.sort(key=lambda e: (e.start_time, e.event_id))
    return events


def _absorb(corpus: Corpus, events: list[Event], alerts: list[Alert], entry: dict) -> Corpus:
    corpus.events.extend(events)
    corpus.alerts.extend(alerts)
    corpus.sort()
    corpus.manifest.setdefault("scenarios", []).append(entry)
    return corpus


def _paced_starts(day_ts: int, first_second: int, count: int, window_seconds: int) -> list[int]:
    """Evenly pace `count` runs inside a window, refusing to pack them
    tighter than the bundling gap allows."""
    if count == 0:
        return []
    spacing = window_seconds // count
    if spacing < MIN_RUN_SPACING:
        raise ConfigError(
            f"{count} runs cannot fit in {window_seconds}s without bundling together"
        )
    return [day_ts + first_second + i * spacing for i in range(count)]


def _odd_slot_starts(
    rng: np.random.Generator,
    config: GeneratorConfig,
    user_days: list[tuple[str, int]],
    night: bool = False,
) -> list[int]:
    """One odd-slot start per (user, day) row, de-duplicated per stream."""
    labels = sorted({u for u, _ in user_days})
    label_code = {u: i for i, u in enumerate(labels)}
    keys = np.array([label_code[u] * config.day_count + d for u, d in user_days], dtype=np.int64)
    weights = _bin_weights(night, SCENARIO_PARITY)
    bins = schedule_bins(rng, keys, weights)
    jitter = rng.integers(0, 60, size=len(user_days))
    return [
        config.day_ts(day) + (int(b) * 2 + SCENARIO_PARITY) * BIN_SECONDS + int(j)
        for (_, day), b, j in zip(user_days, bins, jitter)
    ]


# --------------------------------------------------------------------------
# injectors
# --------------------------------------------------------------------------

def _inject_setup_spike(corpus: Corpus, params: dict) -> Corpus:
    config = corpus.config
    rng = _scenario_rng(corpus, "setup_spike")
    start_day = config.day_index_of(params.get("start", config.start_date))
    days = int(params.get("days", 21))
    total = int(params.get("alerts", 24_000))
    if start_day + days > config.day_count:
        raise ConfigError("setup spike window exceeds the corpus range")
    users = _active_users(corpus)
    if not users:
        raise ConfigError("setup spike needs an existing base corpus")

    chosen = [users[i] for i in rng.integers(0, len(users), size=total)]
    day_of = rng.integers(start_day, start_day + days, size=total)
    sizes = np.minimum(rng.geometric(config.single_event_fraction, size=total), 100)
    starts = _odd_slot_starts(rng, config, list(zip(chosen, (int(d) for d in day_of))))
    runs = []
    for user, start, size in zip(chosen, starts, sizes):
        idx = _user_index(config, user)
        track = int(rng.integers(1, 400))
        runs.append(
            _Run(
                start=start,
                size=int(size),
                user=user,
                endpoint=config.endpoint_label(idx),
                application="mediaplayer.exe",
                resources=[f"C:/Users/{user}/Music/setup-track-{track + i}.mp3" for i in range(int(size))],
                resource_type=ResourceType.FILE,
                activity=Activity.READ,
            )
        )
    events = _emit(runs, "s")
    alerts = detect_stream(events, corpus.policies)
    if len(alerts) != total:
        raise AssertionError(f"setup spike planned {total} alerts, detected {len(alerts)}")
    entry = {
        "kind": "setup_spike",
        "range": {
            "start": wire.ts_to_iso(config.day_ts(start_day)),
            "end": wire.ts_to_iso(config.day_ts(start_day + days)),
        },
        "alerts": total,
    }
    return _absorb(corpus, events, alerts, entry)


def _inject_giant_alerts(corpus: Corpus, params: dict) -> Corpus:
    """Pre-cap historical bundles with 1000+ events each: fabricated
    directly (the engine would cap them) and flagged by validate_alert."""
    config = corpus.config
    rng = _scenario_rng(corpus, "giant_alerts")
    count = int(params.get("count", 4))
    lo = int(params.get("min_events", 1050))
    hi = int(params.get("max_events", 1400))
    window_days = int(params.get("days", 14))
    users = _active_users(corpus)
    if not users:
        raise ConfigError("giant alerts need an existing base corpus")
    events: list[Event] = []
    alerts: list[Alert] = []
    ids = []
    eid = 0
    for i in range(count):
        user = users[int(rng.integers(0, len(users)))]
        idx = _user_index(config, user)
        day = int(rng.integers(0, window_days))
        size = int(rng.integers(lo, hi + 1))
        start = config.day_ts(day) + 2 * 3600 + i * 7200  # small hours, far from base slots
        resource = f"C:/Users/{user}/Videos/training-session-{i}.mp4"
        bundle = [
            Event(
                event_id=f"g{eid + j:07d}",
                user=user,
                endpoint=config.endpoint_label(idx),
                application="mediaplayer.exe",
                resource=resource,
                resource_type=ResourceType.FILE,
                activity=Activity.READ,
                start_time=start + j,
                end_time=start + j,
            )
            for j in range(size)
        ]
        eid += size
        events.extend(bundle)
        alert = Alert(
            alert_id=alert_id_for("pol-media-files", bundle[0].event_id),
            alert_time=start,
            policy_id="pol-media-files",
            severity=1,
            events=tuple(bundle),
        )
        alerts.append(alert)
        ids.append(alert.alert_id)
    entry = {
        "kind": "giant_alerts",
        "alert_ids": ids,
        "event_counts": [len(a.events) for a in alerts],
        "range": {
            "start": wire.ts_to_iso(config.day_ts(0)),
            "end": wire.ts_to_iso(config.day_ts(window_days)),
        },
    }
    return _absorb(corpus, events, alerts, entry)


def _inject_pseudo_account_flood(corpus: Corpus, params: dict) -> Corpus:
    config = corpus.config
    start_day = config.day_index_of(params.get("start", "2020-06-01"))
    total = int(params.get("alerts", 100_000))
    account = reserved_user(config, "pseudo_account")
    endpoint = reserved_endpoint(config, "pseudo_account")
    window_days = config.day_count - start_day
    per_day, remainder = divmod(total, window_days)
    runs = []
    for d in range(window_days):
        today = per_day + (1 if d < remainder else 0)
        if today == 0:
            continue
        starts = _paced_starts(config.day_ts(start_day + d), 30, today, SECONDS_PER_DAY - 60)
        for start in starts:
            runs.append(
                _Run(
                    start=start,
                    size=1,
                    user=account,
                    endpoint=endpoint,
                    application="sync-agent.exe",
                    resources=["C:/ProgramData/sync-agent/outbox.db"],
                    resource_type=ResourceType.FILE,
                    activity=Activity.UPDATE,
                )
            )
    events = _emit(runs, "f")
    alerts = detect_stream(events, corpus.policies)
    if len(alerts) != total:
        raise AssertionError(f"flood planned {total} alerts, detected {len(alerts)}")
    entry = {
        "kind": "pseudo_account_flood",
        "account": account,
        "policy_id": "pol-svc-sync",
        "application": "sync-agent.exe",
        "start": wire.ts_to_iso(config.day_ts(start_day)),
        "alerts": total,
    }
    return _absorb(corpus, events, alerts, entry)


WSCRIPT_PRIMARY_PATH = "C:\\Windows\\System32\\wscript.exe"
_WSCRIPT_VARIANTS = (
    "C:\\Windows\\SysWOW64\\wscript.exe",
    "C:\\win64\\wscript.exe",
    "C:\\Windows\\system32\\WSCRIPT.EXE",
)


def _inject_wscript_burst(corpus: Corpus, params: dict) -> Corpus:
    config = corpus.config
    rng = _scenario_rng(corpus, "wscript_burst")
    day = config.day_index_of(params.get("day", "2021-04-26"))
    burst_count = int(params.get("burst_alerts", 110))
    n_others = int(params.get("other_users", 196))
    window_start = config.day_index_of(params.get("window_start", "2021-03-01"))
    if window_start > day:
        raise ConfigError("wscript window must start before the burst day")
    burst_user = reserved_user(config, "wscript_user")
    burst_endpoint = reserved_endpoint(config, "wscript_user")

    runs = []
    burst_base = config.day_ts(day) + 14 * 3600
    for i in range(burst_count):
        runs.append(
            _Run(
                start=burst_base + i * MIN_RUN_SPACING,
                size=1,
                user=burst_user,
                endpoint=burst_endpoint,
                application="wscript.exe",
                resources=[WSCRIPT_PRIMARY_PATH],
                resource_type=ResourceType.FILE,
                activity=Activity.READ,
            )
        )
    if burst_base + burst_count * MIN_RUN_SPACING >= config.day_ts(day) + 16 * 3600:
        raise ConfigError("burst does not fit between 14:00 and 16:00")

    users = _active_users(corpus)
    if len(users) < n_others:
        raise ConfigError("not enough active users for the wscript scenario")
    others = [users[i] for i in rng.choice(len(users), size=n_others, replace=False)]
    user_days: list[tuple[str, int]] = []
    per_user_alerts = rng.integers(1, 5, size=n_others)
    for user, k in zip(others, per_user_alerts):
        for d in rng.integers(window_start, day + 1, size=int(k)):
            user_days.append((user, int(d)))
    starts = _odd_slot_starts(rng, config, user_days)
    for (user, _), start in zip(user_days, starts):
        idx = _user_index(config, user)
        variant = int(rng.integers(0, len(_WSCRIPT_VARIANTS) + 1))
        if variant == len(_WSCRIPT_VARIANTS):
            resource = f"C:\\Users\\{user}\\AppData\\wscript.exe"
        else:
            resource = _WSCRIPT_VARIANTS[variant]
        runs.append(
            _Run(
                start=start,
                size=1,
                user=user,
                endpoint=config.endpoint_label(idx),
                application="wscript.exe",
                resources=[resource],
                resource_type=ResourceType.FILE,
                activity=Activity.READ,
            )
        )
    events = _emit(runs, "w")
    alerts = detect_stream(events, corpus.policies)
    if len(alerts) != len(runs):
        raise AssertionError(f"wscript planned {len(runs)} alerts, detected {len(alerts)}")
    entry = {
        "kind": "wscript_burst",
        "burst_user": burst_user,
        "day": wire.ts_to_iso(config.day_ts(day))[:10],
        "burst_alerts": burst_count,
        "policy_id": "pol-script-host",
        "resource": WSCRIPT_PRIMARY_PATH,
        "hours": [14, 15],
        "window": {
            "start": wire.ts_to_iso(config.day_ts(window_start)),
            "end": wire.ts_to_iso(config.day_ts(day + 1)),
        },
        "graph_user_count": n_others + 1,
        "other_users": sorted(others),
    }
    return _absorb(corpus, events, alerts, entry)


def _inject_usb_guid_share(corpus: Corpus, params: dict) -> Corpus:
    config = corpus.config
    rng = _scenario_rng(corpus, "usb_guid_share")
    day = config.day_index_of(params.get("day", "2021-04-26"))
    history_start = config.day_index_of(params.get("history_start", "2021-03-01"))
    if history_start >= day:
        raise ConfigError("usb history must start before the focus day")
    focus = reserved_user(config, "usb_focus_user")
    focus_endpoint = reserved_endpoint(config, "usb_focus_user")

    def guid() -> str:
        h = "".join(f"{b:02x}" for b in rng.integers(0, 256, 16, dtype=np.uint8))
        return f"{h[:8]}-{h[8:12]}-{h[12:16]}-{h[16:20]}-{h[20:32]}"

    g1, g2, g3, ga, gb = (guid() for _ in range(5))
    descriptors = [f"usb-vol:{{{g}}}" for g in (g1, g2, g3)]
    sharer_descriptors = [f"usb-vol:{{{g1}}};{{{ga}}}", f"usb-vol:{{{g3}}};{{{gb}}}"]

    runs = []
    for hour, descriptor in zip((9, 11, 14), descriptors):
        runs.append(
            _Run(
                start=config.day_ts(day) + hour * 3600 + 780,
                size=1,
                user=focus,
                endpoint=focus_endpoint,
                application="explorer.exe",
                resources=[descriptor],
                resource_type=ResourceType.USB_DEVICE,
                activity=Activity.MOUNT,
            )
        )
    users = _active_users(corpus)
    if len(users) < 2:
        raise ConfigError("usb scenario needs at least two active users")
    sharer_idx = rng.choice(len(users), size=2, replace=False)
    sharers = [users[int(i)] for i in sharer_idx]
    user_days: list[tuple[str, int]] = []
    sharer_runs: list[tuple[str, str]] = []
    for sharer, descriptor in zip(sharers, sharer_descriptors):
        for d in rng.choice(np.arange(history_start, day), size=int(rng.integers(2, 4)), replace=False):
            user_days.append((sharer, int(d)))
            sharer_runs.append((sharer, descriptor))
    starts = _odd_slot_starts(rng, config, user_days)
    for (user, _), (sharer, descriptor), start in zip(user_days, sharer_runs, starts):
        idx = _user_index(config, user)
        runs.append(
            _Run(
                start=start,
                size=1,
                user=user,
                endpoint=config.endpoint_label(idx),
                application="explorer.exe",
                resources=[descriptor],
                resource_type=ResourceType.USB_DEVICE,
                activity=Activity.MOUNT,
            )
        )
    events = _emit(runs, "x")
    alerts = detect_stream(events, corpus.policies)
    # focus mounts fire both the watch-list and the generic policy
    expected = 3 * 2 + len(user_days)
    if len(alerts) != expected:
        raise AssertionError(f"usb scenario planned {expected} alerts, detected {len(alerts)}")
    entry = {
        "kind": "usb_guid_share",
        "focus_user": focus,
        "day": wire.ts_to_iso(config.day_ts(day))[:10],
        "top_policy_id": "pol-usb-watch",
        "top_policy_alerts": 3,
        "descriptors": descriptors,
        "guids": [g1, g2, g3],
        "sharers": sharers,
        "sharer_descriptors": sharer_descriptors,
        "permissive_added_users": 2,
        "window": {
            "start": wire.ts_to_iso(config.day_ts(history_start)),
            "end": wire.ts_to_iso(config.day_ts(day + 1)),
        },
    }
    return _absorb(corpus, events, alerts, entry)


_DEFAULT_HUMP = ((-5, 30), (-4, 45), (-3, 70), (-2, 95), (-1, 140), (1, 110), (2, 45))


def _inject_autosave_file(corpus: Corpus, params: dict) -> Corpus:
    config = corpus.config
    rng = _scenario_rng(corpus, "autosave_file")
    peak_day = config.day_index_of(params.get("peak_day", "2021-03-15"))
    peak_count = int(params.get("peak_alerts", 265))
    hump = tuple(params.get("hump", _DEFAULT_HUMP))
    background_days = int(params.get("background_days", 60))
    user = reserved_user(config, "autosave_user")
    endpoint = reserved_endpoint(config, "autosave_user")
    document = f"C:/Users/{user}/Documents/quarterly-results.pptx"
    odd_document = f"C:/Users/{user}/Documents/meeting-notes.docx"

    window_start_s = int(8.5 * 3600)  # 08:30
    window_len = int(6.5 * 3600)  # until 15:00
    hump_days = {peak_day + offset for offset, _ in hump} | {peak_day}
    if min(hump_days) < 0 or max(hump_days) >= config.day_count:
        raise ConfigError("autosave hump exceeds the corpus range")

    runs = []

    def backup_runs(day: int, count: int, odd_slot: int | None = None) -> None:
        starts = _paced_starts(config.day_ts(day), window_start_s, count, window_len)
        for i, start in enumerate(starts):
            runs.append(
                _Run(
                    start=start,
                    size=1,
                    user=user,
                    endpoint=endpoint,
                    application="clouddrive.exe",
                    resources=[odd_document if i == odd_slot else document],
                    resource_type=ResourceType.FILE,
                    activity=Activity.UPDATE,
                )
            )

    # one backup in the peak day is a different file; everything else is the deck
    backup_runs(peak_day, peak_count, odd_slot=peak_count // 3)
    for offset, count in hump:
        backup_runs(peak_day + offset, count)

    candidates = [d for d in range(config.day_count) if d not in hump_days]
    chosen_days = rng.choice(len(candidates), size=min(background_days, len(candidates)), replace=False)
    background = {}
    for c in chosen_days:
        day = candidates[int(c)]
        count = int(rng.integers(1, 3))
        background[day] = count
        for start in _paced_starts(config.day_ts(day), 10 * 3600, count, 4 * 3600):
            runs.append(
                _Run(
                    start=start,
                    size=1,
                    user=user,
                    endpoint=endpoint,
                    application="clouddrive.exe",
                    resources=[document],
                    resource_type=ResourceType.FILE,
                    activity=Activity.UPDATE,
                )
            )
    events = _emit(runs, "v")
    alerts = detect_stream(events, corpus.policies)
    if len(alerts) != len(runs):
        raise AssertionError(f"autosave planned {len(runs)} alerts, detected {len(alerts)}")
    entry = {
        "kind": "autosave_file",
        "user": user,
        "peak_day": wire.ts_to_iso(config.day_ts(peak_day))[:10],
        "peak_alerts": peak_count,
        "policy_id": "pol-cloud-backup",
        "dominant_resource": document,
        "odd_resource": odd_document,
        "hump": {
            wire.ts_to_iso(config.day_ts(peak_day + offset))[:10]: count for offset, count in hump
        },
        "background_max_per_day": 2,
        "window_hours": ["08:30", "15:00"],
        "analysis_range": {
            "start": wire.ts_to_iso(config.day_ts(max(0, peak_day - 14))),
            "end": wire.ts_to_iso(config.day_ts(min(config.day_count, peak_day + 14))),
        },
    }
    return _absorb(corpus, events, alerts, entry)


def _inject_policy_spike_week(corpus: Corpus, params: dict) -> Corpus:
    """Size the spike so the target week carries `share` of the corpus
    after injection; inject this one last."""
    config = corpus.config
    rng = _scenario_rng(corpus, "policy_spike_week")
    week_day = config.day_index_of(params.get("week_start", "2020-10-05"))
    share = float(params.get("share", 0.20))
    if not 0.0 < share < 1.0:
        raise ConfigError("spike share must lie in (0, 1)")
    if week_day + 7 > config.day_count:
        raise ConfigError("spike week exceeds the corpus range")
    week_t0 = config.day_ts(week_day)
    week_t1 = week_t0 + 7 * SECONDS_PER_DAY
    current_total = len(corpus.alerts)
    in_week = sum(1 for a in corpus.alerts if week_t0 <= a.alert_time < week_t1)
    added = max(0, round((share * current_total - in_week) / (1.0 - share)))

    users = _active_users(corpus)
    if not users:
        raise ConfigError("spike week needs an existing base corpus")
    pool = [users[int(i)] for i in rng.choice(len(users), size=min(int(params.get("max_users", 3000)), len(users)), replace=False)]
    user_days = [
        (pool[int(u)], week_day + int(d))
        for u, d in zip(rng.integers(0, len(pool), size=added), rng.integers(0, 7, size=added))
    ]
    starts = _odd_slot_starts(rng, config, user_days)
    runs = []
    for (user, _), start in zip(user_days, starts):
        idx = _user_index(config, user)
        batch = int(rng.integers(1, 30000))
        runs.append(
            _Run(
                start=start,
                size=1,
                user=user,
                endpoint=config.endpoint_label(idx),
                application="dlp-scan.exe",
                resources=[f"C:/staging/classify-batch-{batch}.dat"],
                resource_type=ResourceType.FILE,
                activity=Activity.READ,
            )
        )
    events = _emit(runs, "k")
    alerts = detect_stream(events, corpus.policies)
    if len(alerts) != added:
        raise AssertionError(f"spike week planned {added} alerts, detected {len(alerts)}")
    final_share = (in_week + added) / (current_total + added) if current_total + added else 0.0
    entry = {
        "kind": "policy_spike_week",
        "week_start": wire.ts_to_iso(week_t0)[:10],
        "policy_id": "pol-dlp-stage",
        "alerts": added,
        "share": round(final_share, 4),
        "range": {"start": wire.ts_to_iso(week_t0), "end": wire.ts_to_iso(week_t1)},
    }
    return _absorb(corpus, events, alerts, entry)


_INJECTORS = {
    "setup_spike": _inject_setup_spike,
    "giant_alerts": _inject_giant_alerts,
    "pseudo_account_flood": _inject_pseudo_account_flood,
    "wscript_burst": _inject_wscript_burst,
    "usb_guid_share": _inject_usb_guid_share,
    "autosave_file": _inject_autosave_file,
    "policy_spike_week": _inject_policy_spike_week,
}


def inject_scenario(corpus: Corpus, spec: ScenarioSpec) -> Corpus:
    """Add one scenario's events and alerts to the corpus and record its
    ground truth in the manifest."""
    return _INJECTORS[spec.kind](corpus, dict(spec.params))


def standard_scenarios(params: dict | None = None) -> list[ScenarioSpec]:
    """Default noise + case-study set, in canonical injection order (the
    spike week goes last so its share is computed over the full corpus).
    ``params`` optionally overrides per-kind parameters by kind name."""
    params = params or {}
    order = (
        "setup_spike",
        "giant_alerts",
        "pseudo_account_flood",
        "wscript_burst",
        "usb_guid_share",
        "autosave_file",
        "policy_spike_week",
    )
    return [ScenarioSpec(kind, params.get(kind, {})) for kind in order]


def inject_standard(corpus: Corpus, params: dict | None = None) -> Corpus:
    for spec in standard_scenarios(params):
        corpus = inject_scenario(corpus, spec)
    corpus.manifest["exclusions_recommended"] = recommended_exclusions(corpus.manifest)
    return corpus


def recommended_exclusions(manifest: dict) -> dict:
    """Cleaning config covering the known data-quality artifacts: the setup
    window, the spike week, and the pseudo account."""
    ranges = []
    users = []
    for entry in manifest.get("scenarios", []):
        if entry["kind"] in ("setup_spike", "policy_spike_week"):
            ranges.append(dict(entry["range"]))
        elif entry["kind"] == "pseudo_account_flood":
            users.append(entry["account"])
    return {"excluded_ranges": ranges, "excluded_users": users}
