"""Synthetic alert corpus generation.

The real dataset behind the documented profile is confidential, so this
module manufactures one: per-user alert totals follow a fitted power law,
events-per-alert is geometric, and every alert is realised by emitting an
event run that genuinely triggers a policy through the detection engine —
no fabricated alert records (the one deliberate exception, oversized
pre-cap bundles, lives in scenarios.py).

Scheduling puts each planned alert in its own 240-second slot, with base
traffic on even slots and scenario traffic on odd slots, so runs never
bleed into each other's bundling windows.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from datetime import date, datetime, timezone
from pathlib import Path
from typing import Callable

import numpy as np

from . import wire
from .engine import detect_stream
from .errors import ConfigError
from .model import Activity, Alert, Event, Policy, ResourceType

SECONDS_PER_DAY = 86400
BIN_SECONDS = 240
HALF_BINS = 180  # even (base) or odd (scenario) 240s slots per day
MAX_JITTER = 60

BASE_PARITY = 0
SCENARIO_PARITY = 1

# hour-of-day weights for ordinary working traffic
_BUSINESS_HOURS = np.array(
    [0.05, 0.04, 0.04, 0.04, 0.05, 0.08, 0.30, 0.55, 0.85, 1.0, 1.0, 1.0,
     0.85, 1.0, 1.0, 1.0, 0.9, 0.75, 0.45, 0.25, 0.15, 0.10, 0.08, 0.06]
)
_NIGHT_HOURS = np.array([1.0] * 6 + [0.0] * 16 + [1.0, 1.0])  # 22..05

_WEEKDAY_FACTOR = (1.0, 1.05, 1.05, 1.0, 0.95, 0.3, 0.25)  # Mon..Sun


@dataclass(frozen=True)
class GeneratorConfig:
    """Scale and shape knobs for the synthetic corpus.

    ``target_alerts`` is the intended size of the finished corpus including
    injected noise; the base generator aims for ``target_alerts -
    noise_budget`` and the standard noise scenarios fill the rest.
    ``tail_shape`` is the power-law exponent for per-user rates; leave it
    None to have it fitted so the top user out-alerts the 100th by ~30x.
    """

    user_count: int = 15_000
    day_count: int = 820
    target_alerts: int = 900_000
    tail_shape: float | None = None
    single_event_fraction: float = 0.66
    seed: int = 7
    start_date: str = "2019-02-04"
    noise_budget: int = 300_000
    active_user_fraction: float = 0.92
    reserved_users: int = 16

    def __post_init__(self) -> None:
        if min(self.user_count, self.day_count, self.target_alerts) <= 0:
            raise ConfigError("user_count, day_count and target_alerts must be positive")
        if not 0.0 < self.single_event_fraction < 1.0:
            raise ConfigError("single_event_fraction must lie in (0, 1)")
        if not 0.0 < self.active_user_fraction <= 1.0:
            raise ConfigError("active_user_fraction must lie in (0, 1]")
        if self.tail_shape is not None and self.tail_shape <= 0:
            raise ConfigError("tail_shape must be positive")
        if not 0 <= self.noise_budget < self.target_alerts:
            raise ConfigError("noise_budget must be smaller than target_alerts")
        if self.user_count <= self.reserved_users:
            raise ConfigError("user_count must exceed the reserved scenario users")

    @property
    def start_ts(self) -> int:
        return date_to_ts(self.start_date)

    @property
    def end_ts(self) -> int:
        return self.start_ts + self.day_count * SECONDS_PER_DAY

    def base_target(self) -> int:
        return self.target_alerts - self.noise_budget

    def user_label(self, index: int) -> str:
        return f"u{index:05d}"

    def endpoint_label(self, index: int) -> str:
        return f"ep{index:05d}"

    def day_ts(self, day_index: int) -> int:
        return self.start_ts + day_index * SECONDS_PER_DAY

    def day_index_of(self, iso_date: str) -> int:
        idx = (date_to_ts(iso_date) - self.start_ts) // SECONDS_PER_DAY
        if not 0 <= idx < self.day_count:
            raise ConfigError(f"{iso_date} is outside the corpus range")
        return int(idx)


def date_to_ts(iso_date: str) -> int:
    d = date.fromisoformat(iso_date)
    return int(datetime(d.year, d.month, d.day, tzinfo=timezone.utc).timestamp())


@dataclass
class Corpus:
    """Events plus the alerts they triggered, with a ground-truth manifest."""

    config: GeneratorConfig
    policies: list[Policy]
    events: list[Event]
    alerts: list[Alert]
    manifest: dict = field(default_factory=dict)

    def sort(self) -> None:
        self.events.sort(key=lambda e: (e.start_time, e.event_id))
        self.alerts.sort(key=lambda a: (a.alert_time, a.alert_id))


@dataclass(frozen=True)
class CorpusStats:
    total_alerts: int
    distinct_alerting_users: int
    single_event_fraction: float
    rank1_count: int
    rank100_count: int
    weekly_totals: tuple[int, ...]
    max_week_share: float

    def to_json(self) -> dict:
        return {
            "total_alerts": self.total_alerts,
            "distinct_alerting_users": self.distinct_alerting_users,
            "single_event_fraction": round(self.single_event_fraction, 6),
            "rank1_count": self.rank1_count,
            "rank100_count": self.rank100_count,
            "weekly_totals": list(self.weekly_totals),
            "max_week_share": round(self.max_week_share, 6),
        }


# --------------------------------------------------------------------------
# event run crafting, one recipe per generatable policy
# --------------------------------------------------------------------------

FieldsFn = Callable[[int], tuple[str, str, ResourceType, Activity]]


class _Recipes:
    """Per-policy event crafting; every event a recipe emits matches its
    policy and no other default policy."""

    def __init__(self, rng: np.random.Generator, user_labels: list[str]) -> None:
        self.rng = rng
        self.user_labels = user_labels
        self._stick_guid: dict[int, str] = {}

    def _guid(self) -> str:
        h = "".join(f"{b:02x}" for b in self.rng.integers(0, 256, 16, dtype=np.uint8))
        return f"{h[:8]}-{h[8:12]}-{h[12:16]}-{h[16:20]}-{h[20:32]}"

    def media(self, user_idx: int) -> FieldsFn:
        user = self.user_labels[user_idx]
        ext = ".mp3" if self.rng.integers(0, 100) < 70 else ".mp4"
        track = int(self.rng.integers(1, 500))
        return lambda i: (
            "mediaplayer.exe",
            f"C:/Users/{user}/Music/track-{track + i}{ext}",
            ResourceType.FILE,
            Activity.READ,
        )

    def cloud(self, user_idx: int) -> FieldsFn:
        user = self.user_labels[user_idx]
        doc = int(self.rng.integers(1, 120))
        resource = f"C:/Users/{user}/Documents/working-doc-{doc}.docx"
        return lambda i: ("clouddrive.exe", resource, ResourceType.FILE, Activity.UPDATE)

    def usb(self, user_idx: int) -> FieldsFn:
        guid = self._stick_guid.get(user_idx)
        if guid is None:
            guid = self._guid()
            self._stick_guid[user_idx] = guid
        resource = f"usb-vol:{{{guid}}}"
        return lambda i: ("explorer.exe", resource, ResourceType.USB_DEVICE, Activity.MOUNT)

    def late_hours(self, user_idx: int) -> FieldsFn:
        user = self.user_labels[user_idx]
        page = int(self.rng.integers(1, 300))
        return lambda i: (
            "browser.exe",
            f"C:/Users/{user}/AppData/cache/nsfw-page-{page + i}.html",
            ResourceType.FILE,
            Activity.READ,
        )


# recipe name -> (policy id it triggers, base mix weight, night schedule?)
BASE_MIX = {
    "media": ("pol-media-files", 0.50, False),
    "cloud": ("pol-cloud-backup", 0.30, False),
    "usb": ("pol-usb-mount", 0.13, False),
    "late_hours": ("pol-late-hours", 0.07, True),
}


def _bin_weights(night: bool, parity: int) -> np.ndarray:
    hours = _NIGHT_HOURS if night else _BUSINESS_HOURS
    seconds = (np.arange(HALF_BINS) * 2 + parity) * BIN_SECONDS
    w = hours[seconds // 3600]
    total = w.sum()
    if total == 0:
        w = np.ones(HALF_BINS)
        total = w.sum()
    return w / total


def _day_weights(config: GeneratorConfig) -> np.ndarray:
    start_day = config.start_ts // SECONDS_PER_DAY
    weekdays = (np.arange(config.day_count) + start_day + 3) % 7
    w = np.array([_WEEKDAY_FACTOR[d] for d in weekdays])
    return w / w.sum()


def fit_tail_shape(
    active_users: int, total_alerts: int, target_ratio: float = 30.0, probe_seed: int = 90210
) -> float:
    """Bisection on the power-law exponent until the realised top-user /
    100th-user count ratio lands on the target."""
    if active_users < 100:
        return 0.74  # ratio undefined below 100 users; generic long tail
    ranks = np.arange(1, active_users + 1, dtype=np.float64)

    def realised_ratio(shape: float) -> float:
        weights = ranks ** -shape
        weights /= weights.sum()
        counts = np.random.default_rng(probe_seed).multinomial(total_alerts, weights)
        counts.sort()
        top = counts[::-1]
        if top[99] == 0:
            return float("inf")
        return float(top[0]) / float(top[99])

    lo, hi = 0.2, 1.6
    for _ in range(40):
        mid = (lo + hi) / 2
        if realised_ratio(mid) < target_ratio:
            lo = mid
        else:
            hi = mid
    return round((lo + hi) / 2, 4)


def schedule_bins(
    rng: np.random.Generator,
    group_keys: np.ndarray,
    weights: np.ndarray | list[np.ndarray],
    weight_index: np.ndarray | None = None,
) -> np.ndarray:
    """Draw a 0..HALF_BINS-1 slot per row, de-duplicated within each group.

    ``group_keys`` must be equal for rows that share a (user, day, policy)
    stream; colliding rows probe forward to the next free slot so two runs
    of one stream never land close enough to bundle together.
    """
    n = len(group_keys)
    if isinstance(weights, list):
        assert weight_index is not None
        bins = np.empty(n, dtype=np.int64)
        for idx, w in enumerate(weights):
            sel = weight_index == idx
            count = int(sel.sum())
            if count:
                bins[sel] = rng.choice(HALF_BINS, size=count, p=w)
    else:
        bins = rng.choice(HALF_BINS, size=n, p=weights)
    order = np.argsort(group_keys, kind="stable")
    taken: set[int] = set()
    current_key = None
    for row in order:
        key = group_keys[row]
        if key != current_key:
            current_key = key
            taken = set()
        b = int(bins[row])
        while b in taken:
            b = (b + 1) % HALF_BINS
        taken.add(b)
        bins[row] = b
    return bins


def generate(config: GeneratorConfig, policies: list[Policy]) -> Corpus:
    """Build the base corpus: power-law users, geometric bundle sizes, and
    events that genuinely trigger the supplied policies. Deterministic for a
    fixed seed."""
    if not policies:
        raise ConfigError("generate needs at least one policy")
    policy_ids = {p.policy_id for p in policies}
    recipes = [(name, pid, weight, night) for name, (pid, weight, night) in BASE_MIX.items()
               if pid in policy_ids]
    if not recipes:
        raise ConfigError("no supplied policy has a generation recipe")
    mix = np.array([w for _, _, w, _ in recipes])
    mix /= mix.sum()

    rng = np.random.default_rng(config.seed)
    user_labels = [config.user_label(i) for i in range(config.user_count)]
    crafters = _Recipes(np.random.default_rng(np.random.SeedSequence([config.seed, 1])), user_labels)

    candidates = config.user_count - config.reserved_users
    active_count = max(1, round(config.active_user_fraction * candidates))
    permutation = rng.permutation(candidates)
    active_users = permutation[:active_count]

    total = config.base_target()
    shape = config.tail_shape
    if shape is None:
        shape = fit_tail_shape(active_count, total)
    weights = np.arange(1, active_count + 1, dtype=np.float64) ** -shape
    weights /= weights.sum()
    totals_per_rank = rng.multinomial(total, weights)

    user_of_alert = np.repeat(active_users, totals_per_rank).astype(np.int64)
    n = len(user_of_alert)
    days = rng.choice(config.day_count, size=n, p=_day_weights(config))
    recipe_of_alert = rng.choice(len(recipes), size=n, p=mix)
    bundle_sizes = np.minimum(rng.geometric(config.single_event_fraction, size=n), 100)

    night_flags = np.array([night for _, _, _, night in recipes])
    bin_w = [_bin_weights(night, BASE_PARITY) for night in night_flags]
    group_keys = (user_of_alert * config.day_count + days) * len(recipes) + recipe_of_alert
    bins = schedule_bins(rng, group_keys, bin_w, recipe_of_alert)
    jitter = rng.integers(0, MAX_JITTER, size=n)
    starts = (
        config.start_ts
        + days * SECONDS_PER_DAY
        + (bins * 2 + BASE_PARITY) * BIN_SECONDS
        + jitter
    )

    recipe_fns = {
        "media": crafters.media,
        "cloud": crafters.cloud,
        "usb": crafters.usb,
        "late_hours": crafters.late_hours,
    }
    events: list[Event] = []
    order = np.argsort(starts, kind="stable")
    eid = 0
    for row in order:
        user_idx = int(user_of_alert[row])
        name = recipes[recipe_of_alert[row]][0]
        fields = recipe_fns[name](user_idx)
        start = int(starts[row])
        user = user_labels[user_idx]
        endpoint = config.endpoint_label(user_idx)
        for i in range(int(bundle_sizes[row])):
            application, resource, rtype, activity = fields(i)
            duration = 30 if activity is Activity.READ else 0
            events.append(
                Event(
                    event_id=f"b{eid:08d}",
                    user=user,
                    endpoint=endpoint,
                    application=application,
                    resource=resource,
                    resource_type=rtype,
                    activity=activity,
                    start_time=start + i,
                    end_time=start + i + duration,
                )
            )
            eid += 1

    # runs were laid out in start order, but multi-event runs interleave
    events.sort(key=lambda e: (e.start_time, e.event_id))
    alerts = detect_stream(events, policies)
    if len(alerts) != n:
        raise AssertionError(
            f"generator planned {n} alerts but detection produced {len(alerts)}; "
            "a crafting recipe no longer matches its policy cleanly"
        )

    manifest = {
        "config": asdict(config),
        "range": {"start": wire.ts_to_iso(config.start_ts), "end": wire.ts_to_iso(config.end_ts)},
        "base": {
            "alerts": int(n),
            "events": len(events),
            "active_users": int(active_count),
            "tail_shape": float(shape),
            "policy_mix": {recipes[i][1]: float(mix[i]) for i in range(len(recipes))},
        },
        "scenarios": [],
    }
    corpus = Corpus(config=config, policies=list(policies), events=events, alerts=alerts, manifest=manifest)
    corpus.sort()
    return corpus


def corpus_stats(corpus: Corpus) -> CorpusStats:
    """Exact corpus-level statistics by full scan."""
    alerts = corpus.alerts
    total = len(alerts)
    if total == 0:
        return CorpusStats(0, 0, 0.0, 0, 0, (), 0.0)
    by_user: dict[str, int] = {}
    single = 0
    week_counts: dict[int, int] = {}
    for alert in alerts:
        user = alert.events[0].user
        by_user[user] = by_user.get(user, 0) + 1
        if len(alert.events) == 1:
            single += 1
        day = alert.alert_time // SECONDS_PER_DAY
        week = (day - (day + 3) % 7) // 7
        week_counts[week] = week_counts.get(week, 0) + 1
    ranked = sorted(by_user.values(), reverse=True)
    weeks = sorted(week_counts)
    weekly = tuple(week_counts.get(w, 0) for w in range(weeks[0], weeks[-1] + 1))
    return CorpusStats(
        total_alerts=total,
        distinct_alerting_users=len(by_user),
        single_event_fraction=single / total,
        rank1_count=ranked[0],
        rank100_count=ranked[99] if len(ranked) >= 100 else 0,
        weekly_totals=weekly,
        max_week_share=max(weekly) / total,
    )


# --------------------------------------------------------------------------
# corpus files
# --------------------------------------------------------------------------

def write_corpus(corpus: Corpus, out_dir: str | Path) -> dict[str, Path]:
    """Write events.jsonl, alerts.jsonl, policies.json and manifest.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "events": out / "events.jsonl",
        "alerts": out / "alerts.jsonl",
        "policies": out / "policies.json",
        "manifest": out / "manifest.json",
    }
    with paths["events"].open("w") as fh:
        wire.write_jsonl((wire.event_to_json(e) for e in corpus.events), fh)
    with paths["alerts"].open("w") as fh:
        wire.write_jsonl((wire.alert_to_json(a) for a in corpus.alerts), fh)
    paths["policies"].write_text(
        json.dumps([wire.policy_to_json(p) for p in corpus.policies], indent=2, sort_keys=True)
    )
    paths["manifest"].write_text(json.dumps(corpus.manifest, indent=2, sort_keys=True))
    return paths
