"""
Flat ``key = value`` run configuration.

Example (the built-in default, two branches with a 30/70 SNR split)::

    m_ary = 8
    receiver = 17
    snr_db = 0:35:5
    trials = 1000000
    seed = 1
    rho_mode = direct
    branch.1.kappa = 3
    branch.1.fd_T = 0.03
    branch.1.fraction = 0.3
    branch.2.kappa = 3
    branch.2.fd_T = 0.05
    branch.2.fraction = 0.7

``snr_db`` is total mean SNR per bit in dB, either a comma list or an
inclusive ``start:stop:step`` range. ``receiver`` may list several kinds
(``17, 18, 20``). Per branch, ``noise_psd`` (default 1) and ``rho`` (a
complex literal such as ``0.5+0.1j`` that overrides the Doppler model) are
optional. Lines starting with ``#`` are comments, except that the manifest
lines ``# key = value`` written into CSV headers are read back by
:func:`config_from_manifest`.
"""

import math
import re
from dataclasses import dataclass, field
from typing import Optional

from .exceptions import ConfigError
from .fading import DopplerModel
from .montecarlo import BranchSpec, SimConfig
from .receivers import ReceiverKind

__all__ = ["RunManifest", "DEFAULT_CONFIG", "parse_config", "format_config", "config_from_manifest",
           "parse_snr_grid"]

DEFAULT_CONFIG = """\
m_ary = 8
receiver = 17
snr_db = 0:35:5
trials = 1000000
seed = 1
rho_mode = direct
branch.1.kappa = 3
branch.1.fd_T = 0.03
branch.1.fraction = 0.3
branch.2.kappa = 3
branch.2.fd_T = 0.05
branch.2.fraction = 0.7
"""

_TOP_KEYS = {"m_ary", "receiver", "snr_db", "trials", "seed", "rho_mode", "es"}
_BRANCH_KEYS = {"kappa", "fd_T", "fraction", "noise_psd", "rho"}
# keys echoed in CSV headers that describe the run, not the configuration
_MANIFEST_ONLY = {"mode", "tool_version", "timestamp"}
_BRANCH_RE = re.compile(r"^branch\.(\d+)\.(\w+)$")


@dataclass(frozen=True)
class RunManifest:
    config: SimConfig
    receivers: tuple
    mode: str
    tool_version: str
    output: Optional[str] = None
    timestamp: Optional[str] = field(default=None)


def parse_snr_grid(text):
    text = text.strip()
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if step <= 0 or stop < start:
                raise ConfigError(f"bad SNR range {text!r}")
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            return tuple(start + i * step for i in range(n))
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise ConfigError(f"bad SNR grid {text!r}: {exc}") from None


def _parse_lines(text):
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _number(key, value, kind=float):
    try:
        return kind(value)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {value!r} as {kind.__name__}") from None


def _receivers(value):
    kinds = []
    for part in value.split(","):
        try:
            kinds.append(ReceiverKind(int(part)))
        except ValueError:
            raise ConfigError(f"receiver: unknown kind {part.strip()!r}; use 17, 18, 19 or 20") from None
    if not kinds:
        raise ConfigError("receiver: empty")
    return tuple(dict.fromkeys(kinds))


def build_config(values):
    """Turn a ``{key: text}`` mapping into ``(SimConfig, receivers)``."""
    top = {}
    branches = {}
    for key, value in values.items():
        m = _BRANCH_RE.match(key)
        if m:
            idx, name = int(m.group(1)), m.group(2)
            if name not in _BRANCH_KEYS:
                raise ConfigError(f"unknown branch key {key!r}")
            branches.setdefault(idx, {})[name] = value
        elif key in _TOP_KEYS:
            top[key] = value
        elif key not in _MANIFEST_ONLY:
            raise ConfigError(f"unknown key {key!r}")
    if not branches:
        raise ConfigError("no branches configured")
    if sorted(branches) != list(range(1, len(branches) + 1)):
        raise ConfigError("branches must be numbered 1..L without gaps")

    specs = []
    for idx in sorted(branches):
        b = branches[idx]
        try:
            doppler = None
            if "kappa" in b or "fd_T" in b:
                doppler = DopplerModel(_number(f"branch.{idx}.kappa", b.get("kappa", "0")),
                                       _number(f"branch.{idx}.fd_T", b.get("fd_T", "0")))
            rho = _number(f"branch.{idx}.rho", b["rho"], complex) if "rho" in b else None
            if "fraction" not in b:
                raise ConfigError(f"branch.{idx}.fraction is required")
            specs.append(BranchSpec(
                fraction=_number(f"branch.{idx}.fraction", b["fraction"]),
                doppler=doppler,
                noise_psd=_number(f"branch.{idx}.noise_psd", b.get("noise_psd", "1")),
                rho=rho,
            ))
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"branch.{idx}: {exc}") from None

    receivers = _receivers(top.get("receiver", "17"))
    try:
        config = SimConfig(
            branches=tuple(specs),
            snr_db=parse_snr_grid(top.get("snr_db", "0:35:5")),
            m_ary=_number("m_ary", top.get("m_ary", "8"), int),
            receiver=receivers[0],
            trials=_number("trials", top.get("trials", "1000000"), int),
            seed=_number("seed", top.get("seed", "1"), int),
            rho_mode=top.get("rho_mode", "direct"),
            es=_number("es", top.get("es", "1")),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None
    return config, receivers


def parse_config(text):
    """Parse configuration text into ``(SimConfig, receivers)``."""
    return build_config(_parse_lines(text))


def format_config(config: SimConfig, receivers=None):
    """Render a configuration as ``key = value`` lines that parse back to it."""
    receivers = receivers or (config.receiver,)
    lines = [
        f"m_ary = {config.m_ary}",
        "receiver = " + ", ".join(str(int(k)) for k in receivers),
        "snr_db = " + ", ".join(repr(x) for x in config.snr_db),
        f"trials = {config.trials}",
        f"seed = {config.seed}",
        f"rho_mode = {config.rho_mode}",
        f"es = {config.es!r}",
    ]
    for i, b in enumerate(config.branches, 1):
        if b.doppler is not None:
            lines.append(f"branch.{i}.kappa = {b.doppler.kappa!r}")
            lines.append(f"branch.{i}.fd_T = {b.doppler.fd_T!r}")
        lines.append(f"branch.{i}.fraction = {b.fraction!r}")
        lines.append(f"branch.{i}.noise_psd = {b.noise_psd!r}")
        if b.rho is not None:
            lines.append(f"branch.{i}.rho = {complex(b.rho)!r}".replace("(", "").replace(")", ""))
    return lines


def manifest_header(manifest: RunManifest):
    """CSV header comment lines echoing the manifest.

    The output path is not echoed and the timestamp only when set, so
    identical configurations produce byte-identical files.
    """
    lines = [f"mdpsk-div {manifest.tool_version} {manifest.mode}",
             f"mode = {manifest.mode}",
             f"tool_version = {manifest.tool_version}"]
    if manifest.timestamp:
        lines.append(f"timestamp = {manifest.timestamp}")
    lines += format_config(manifest.config, manifest.receivers)
    return ["# " + line for line in lines]


def config_from_manifest(text):
    """Recover ``(SimConfig, receivers)`` from the header of a CSV this tool wrote."""
    values = {}
    for raw in text.splitlines():
        if not raw.startswith("#"):
            break
        line = raw[1:].strip()
        if " = " in line:
            key, value = line.split(" = ", 1)
            values[key.strip()] = value.strip()
    return build_config(values)
