"""Scenario files and attack descriptors for the command line.

A scenario is a YAML mapping::

    n: 4
    event: [C2, C1, 1, 0]          # or "C2 C1 1 0"
    attack: {single-qubit: 1}      # none | {diagonal-phases: [0, pi, ...]}
                                   # | {apparatus: states.json}
    mode: exact                    # or {monte-carlo: {shots: 10000, seed: 7}}

Attacks can also be written as one string (``none``, ``single-qubit:1``,
``diagonal-phases:0,pi``, ``apparatus:states.json``), which is the form the
``scan`` subcommand takes.  Apparatus files hold a ``d x d x D`` nested
array of ``[re, im]`` pairs, optionally wrapped as ``{"states": ...}``.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from .attacks import (ApparatusSpec, AttackChannel, apparatus_to_channel, diagonal_phase_attack,
                      identity_attack, single_qubit_attack)
from .errors import InvalidArgument
from .protocol import Event

ATTACK_KINDS = ("none", "single-qubit", "diagonal-phases", "apparatus")

_PI_RE = re.compile(r"^([+-]?(?:\d+(?:\.\d*)?|\.\d+)?)\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d*)?))?$")


class ConfigError(Exception):
    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


def parse_angle(value) -> float:
    """A float, or a multiple of pi such as ``pi``, ``-pi/2``, ``2pi/3``."""
    if isinstance(value, bool):
        raise InvalidArgument(f"bad angle {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    text = str(value).strip().lower()
    try:
        return float(text)
    except ValueError:
        pass
    m = _PI_RE.match(text)
    if not m:
        raise InvalidArgument(f"bad angle {value!r}")
    coef = m.group(1)
    coef = -1.0 if coef == "-" else 1.0 if coef in ("", "+") else float(coef)
    den = float(m.group(2)) if m.group(2) else 1.0
    return coef * math.pi / den


@dataclass(frozen=True)
class AttackSpec:
    kind: str = "none"
    voter: Optional[int] = None
    phases: tuple = ()
    path: Optional[str] = None

    def describe(self) -> str:
        if self.kind == "single-qubit":
            return f"single-qubit:{self.voter}"
        if self.kind == "diagonal-phases":
            return "diagonal-phases:" + ",".join(repr(p) for p in self.phases)
        if self.kind == "apparatus":
            return f"apparatus:{self.path}"
        return "none"

    def build(self, n: int, s: int) -> AttackChannel:
        """Concrete channel for an ``n``-voter round announcing ``s``."""
        if self.kind == "none":
            return identity_attack(n)
        if self.kind == "single-qubit":
            return single_qubit_attack(self.voter, n)
        if self.kind == "diagonal-phases":
            spec = diagonal_phase_attack(s, n, self.phases)
            return apparatus_to_channel(spec, self.describe())
        return apparatus_to_channel(load_apparatus(self.path, n, s), self.describe())


def parse_attack(value, base_dir: Optional[Path] = None) -> AttackSpec:
    if value is None:
        return AttackSpec()
    if isinstance(value, str):
        kind, _, arg = value.strip().partition(":")
        kind = kind.strip().lower()
        if kind == "none" and not arg:
            return AttackSpec()
        if kind == "diagonal-phases":
            return parse_attack({kind: [a for a in arg.split(",") if a.strip()]}, base_dir)
        if kind in ATTACK_KINDS and arg:
            return parse_attack({kind: arg.strip()}, base_dir)
        raise InvalidArgument(f"bad attack {value!r}; expected one of "
                              "none, single-qubit:<i>, diagonal-phases:<list>, apparatus:<file>")
    if isinstance(value, dict) and len(value) == 1:
        ((kind, arg),) = value.items()
        kind = str(kind).lower()
        if kind == "none":
            return AttackSpec()
        if kind == "single-qubit":
            try:
                return AttackSpec(kind, voter=int(arg))
            except (TypeError, ValueError):
                raise InvalidArgument(f"single-qubit needs a voter index, got {arg!r}") from None
        if kind == "diagonal-phases":
            if not isinstance(arg, (list, tuple)):
                raise InvalidArgument("diagonal-phases needs a list of angles")
            return AttackSpec(kind, phases=tuple(parse_angle(a) for a in arg))
        if kind == "apparatus":
            path = Path(str(arg))
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            return AttackSpec(kind, path=str(path))
    raise InvalidArgument(f"bad attack {value!r}")


def load_apparatus(path, n: int, s: int) -> ApparatusSpec:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InvalidArgument(f"cannot read apparatus file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InvalidArgument(f"apparatus file {path}: line {exc.lineno}: {exc.msg}") from None
    if isinstance(data, dict):
        data = data.get("states")
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 4 or arr.shape[-1] != 2:
        raise InvalidArgument(
            f"apparatus file {path}: expected a d x d x D array of [re, im] pairs, "
            f"got shape {arr.shape}")
    return ApparatusSpec(n, s, arr[..., 0] + 1j * arr[..., 1])


def dump_apparatus(spec: ApparatusSpec, path) -> None:
    pairs = np.stack([spec.states.real, spec.states.imag], axis=-1)
    with open(path, "w") as fh:
        json.dump({"n": spec.n, "s": spec.s, "states": pairs.tolist()}, fh)


@dataclass(frozen=True)
class ScenarioConfig:
    n: int
    event: Event
    attack: AttackSpec = field(default_factory=AttackSpec)
    shots: Optional[int] = None
    seed: Optional[int] = None
    source: Optional[str] = None

    @property
    def mode(self) -> str:
        return "monte-carlo" if self.shots else "exact"

    def to_dict(self) -> dict:
        return {"scenario": self.source, "n": self.n, "event": list(self.event.tokens()),
                "attack": self.attack.describe(), "mode": self.mode,
                "shots": self.shots, "seed": self.seed}


def _key_lines(text):
    try:
        node = yaml.compose(text)
    except yaml.YAMLError:
        return {}
    if not isinstance(node, yaml.MappingNode):
        return {}
    return {k.value: v.start_mark.line + 1 for k, v in node.value}


def parse_scenario(text: str, source: Optional[str] = None,
                   base_dir: Optional[Path] = None) -> ScenarioConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(f"malformed YAML: {getattr(exc, 'problem', exc)}",
                          line=mark.line + 1 if mark else None) from None
    if not isinstance(data, dict):
        raise ConfigError("scenario must be a mapping with keys n, event, attack, mode")
    lines = _key_lines(text)
    unknown = set(data) - {"n", "event", "attack", "mode"}
    if unknown:
        key = sorted(map(str, unknown))[0]
        raise ConfigError("unknown key", field=key, line=lines.get(key))

    def fail(key, msg):
        raise ConfigError(msg, field=key, line=lines.get(key))

    if "event" not in data:
        fail("event", "missing")
    raw_event = data["event"]
    tokens = raw_event.split() if isinstance(raw_event, str) else raw_event
    if not isinstance(tokens, list):
        fail("event", "expected a list of actions")
    n = data.get("n", len(tokens))
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        fail("n", f"expected a positive integer, got {n!r}")
    if len(tokens) != n:
        fail("event", f"{len(tokens)} actions for n={n}")
    try:
        event = Event.from_tokens(tokens)
    except InvalidArgument as exc:
        fail("event", str(exc))
    try:
        attack = parse_attack(data.get("attack"), base_dir)
    except InvalidArgument as exc:
        fail("attack", str(exc))

    shots = seed = None
    mode = data.get("mode", "exact")
    if isinstance(mode, dict) and set(mode) == {"monte-carlo"}:
        mc = mode["monte-carlo"] or {}
        if not isinstance(mc, dict):
            fail("mode", "monte-carlo needs {shots: N, seed: S}")
        shots, seed = mc.get("shots"), mc.get("seed", 0)
        if not isinstance(shots, int) or shots < 1:
            fail("mode", f"shots must be a positive integer, got {shots!r}")
        if not isinstance(seed, int):
            fail("mode", f"seed must be an integer, got {seed!r}")
    elif mode != "exact":
        fail("mode", f"expected 'exact' or {{monte-carlo: ...}}, got {mode!r}")
    return ScenarioConfig(n, event, attack, shots, seed, source)


def load_scenario(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read scenario: {exc}") from None
    return parse_scenario(text, str(path), path.parent)
