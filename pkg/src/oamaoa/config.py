"""Experiment configuration and its TOML loader."""

import dataclasses
import hashlib
import json
import math
import re
from dataclasses import dataclass

import numpy as np

from .channel import FIDELITIES, CarrierGrid, ModeSet
from .geometry import LinkGeometry, MisalignmentPose, UcaLayout
from .pilots import SignContext, SignMode

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib


class ConfigError(ValueError):
    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where = f"{source}:{line}: " if line is not None else f"{source}: "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(where + message)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one experiment.

    ``radius = None`` means ten wavelengths at the first subcarrier.
    """

    n_elements: int = 9
    k_first: float = 47.0
    subcarriers: int = 8
    mode_min: int = -4
    mode_max: int = 3
    radius: float = None
    r: float = 40.0
    phi_deg: float = 7.0
    theta_deg: float = 7.0
    main_lobe_deg: tuple = (2.0, 8.0)
    snr_db: tuple = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    estimate_snr_db: float = 20.0
    trials: int = 1000
    seed: int = 0
    sign_mode: str = "genie"
    channel: str = "approx"
    snapshots: int = 1
    subarray: int = None
    max_flagged_fraction: float = 0.5
    workers: int = 1
    scaling_sizes: tuple = (4, 8, 16, 32)
    scaling_snr_db: float = 20.0

    def __post_init__(self):
        for name in ("main_lobe_deg", "snr_db", "scaling_sizes"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        self.validate()

    def validate(self):
        """Raise ``ConfigError`` naming the offending key."""
        checks = [
            ("n_elements", self.n_elements >= 1),
            ("subcarriers", self.subcarriers >= 2),
            ("mode_max", self.mode_max >= self.mode_min),
            ("mode_min", self.mode_min <= 0 <= self.mode_max),
            ("r", self.r > 0),
            ("trials", self.trials >= 1),
            ("snapshots", self.snapshots >= 1),
            ("workers", self.workers >= 1),
            ("sign_mode", self.sign_mode in {m.value for m in SignMode}),
            ("channel", self.channel in FIDELITIES),
            ("main_lobe_deg", len(self.main_lobe_deg) == 2 and self.main_lobe_deg[0] <= self.main_lobe_deg[1]),
            ("snr_db", len(self.snr_db) >= 1 and not any(math.isnan(s) for s in self.snr_db)),
            ("estimate_snr_db", not math.isnan(self.estimate_snr_db)),
            ("max_flagged_fraction", 0.0 <= self.max_flagged_fraction <= 1.0),
            ("scaling_sizes", len(self.scaling_sizes) >= 2 and min(self.scaling_sizes) >= 2),
        ]
        for key, ok in checks:
            if not ok:
                raise _key_error(key, getattr(self, key))
        if self.radius is not None and not self.radius > 0:
            raise _key_error("radius", self.radius)
        if self.mode_max - self.mode_min + 1 > self.n_elements:
            raise _key_error("mode_max", self.mode_max, "more OAM modes than UCA elements")
        if self.subarray is not None and not 2 <= self.subarray <= min(self.subcarriers, self.mode_count):
            raise _key_error("subarray", self.subarray)
        try:
            self.pose
        except ValueError as exc:
            raise _key_error("theta_deg", self.theta_deg, str(exc)) from None

    @property
    def mode_count(self):
        return self.mode_max - self.mode_min + 1

    @property
    def array_radius(self):
        if self.radius is not None:
            return float(self.radius)
        return 10.0 * 2.0 * np.pi / self.k_first

    @property
    def pose(self):
        return MisalignmentPose.from_degrees(self.r, self.phi_deg, self.theta_deg)

    def geometry(self):
        layout = UcaLayout(self.n_elements, self.array_radius)
        return LinkGeometry(layout, layout, self.pose)

    def modes(self):
        return ModeSet.span(self.mode_min, self.mode_max)

    def carriers(self):
        return CarrierGrid.from_first(self.k_first, self.subcarriers)

    def sign_context(self):
        return SignContext(
            radius_tx=self.array_radius,
            theta_true=self.pose.theta,
            main_lobe=tuple(np.deg2rad(self.main_lobe_deg)),
        )

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}

    def fingerprint(self):
        """Short stable hash of every setting."""
        blob = json.dumps(_jsonable(self.to_dict()), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def header_lines(self):
        lines = [f"config_sha256_16={self.fingerprint()}"]
        for key, value in sorted(self.to_dict().items()):
            lines.append(f"{key}={_format_value(value)}")
        return lines


def _key_error(key, value, why=None):
    msg = f"invalid value for {key!r}: {value!r}"
    if why:
        msg += f" ({why})"
    err = ConfigError(msg)
    err.key = key
    return err


def _jsonable(value):
    if isinstance(value, tuple):
        return [_jsonable(v) for v in value]
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def _format_value(value):
    if isinstance(value, tuple):
        return ",".join(_format_value(v) for v in value)
    return repr(value) if isinstance(value, float) else str(value)


def parse_snr_list(text):
    """Comma-separated SNRs in dB; ``inf`` means noiseless."""
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if part:
            out.append(float(part))
    if not out:
        raise ConfigError("empty SNR list")
    return tuple(out)


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}


def _coerce(key, value):
    kind = _FIELD_TYPES[key]
    if key == "snr_db" and isinstance(value, str):
        return parse_snr_list(value)
    if kind is tuple:
        if not isinstance(value, (list, tuple)):
            raise TypeError("expected an array")
        if key == "scaling_sizes":
            return tuple(int(v) for v in value)
        return tuple(float(v) for v in value)
    if kind is int:
        if value is None and key == "subarray":
            return None
        if isinstance(value, bool) or not isinstance(value, int):
            raise TypeError("expected an integer")
        return value
    if kind is float:
        if value is None:
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise TypeError("expected a number")
        return float(value)
    if kind is str:
        if not isinstance(value, str):
            raise TypeError("expected a string")
        return value
    return value


def _line_of(text, key):
    pattern = re.compile(rf"^[ \t]*{re.escape(key)}[ \t]*=", re.MULTILINE)
    m = pattern.search(text)
    if m is None:
        return None
    return text.count("\n", 0, m.start()) + 1


def config_from_mapping(data, text="", source=None):
    values = {}
    for key, value in data.items():
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown key {key!r}", _line_of(text, key), source)
        try:
            values[key] = _coerce(key, value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{key}: {exc}", _line_of(text, key), source) from None
    try:
        return ExperimentConfig(**values)
    except ConfigError as exc:
        key = getattr(exc, "key", None)
        raise ConfigError(str(exc), _line_of(text, key) if key else None, source) from None


def load_config(path):
    """Read a TOML file of ``key = value`` pairs into an ``ExperimentConfig``.

    Raises:
        ConfigError: with the file name and line number of the problem.
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    text = raw.decode("utf-8", errors="replace")
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        if m:
            line = int(m.group(1))
        elif "end of document" in str(exc):
            line = text.rstrip("\n").count("\n") + 1
        else:
            line = None
        raise ConfigError(str(exc), line, str(path)) from None
    return config_from_mapping(data, text, str(path))
