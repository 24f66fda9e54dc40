"""Pool persistence: one JSON document for params, state, and ledger.

Serialization is canonical (sorted keys, two-space indent, trailing
newline) so identical pools produce byte-identical files and replay runs
can be diffed. Unknown format versions are rejected rather than guessed
at.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ValidationError
from .fixed import FixedDecimal
from .invariant import CurveParams, PoolState, pool_from_dict, pool_to_dict
from .ticks import LpPosition, TickGrid, TickLedger

FORMAT_VERSION = 1


@dataclass(frozen=True)
class PoolFile:
    params: CurveParams
    state: PoolState
    ledger: TickLedger

    def with_state(self, state: PoolState) -> "PoolFile":
        return PoolFile(params=self.params, state=state, ledger=self.ledger)


def to_json_obj(pool: PoolFile) -> dict:
    obj = pool_to_dict(pool.params, pool.state)
    obj["format_version"] = FORMAT_VERSION
    obj["tick_spacing_deg"] = str(pool.ledger.grid.spacing_deg)
    obj["positions"] = pool.ledger.to_list()
    return obj


def from_json_obj(obj: dict) -> PoolFile:
    version = obj.get("format_version")
    if version != FORMAT_VERSION:
        raise ValidationError(f"unknown format_version {version!r}")
    params, state = pool_from_dict(obj)
    try:
        grid = TickGrid(spacing_deg=FixedDecimal(obj["tick_spacing_deg"]))
        positions = tuple(LpPosition.from_dict(p) for p in obj["positions"])
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed pool file: {exc}") from exc
    return PoolFile(params=params, state=state,
                    ledger=TickLedger(grid=grid, positions=positions))


def dumps(pool: PoolFile) -> str:
    return json.dumps(to_json_obj(pool), sort_keys=True, indent=2) + "\n"


def loads(text: str) -> PoolFile:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"not a JSON pool file: {exc}") from exc
    if not isinstance(obj, dict):
        raise ValidationError("pool file must hold a JSON object")
    return from_json_obj(obj)


def save(path: str | Path, pool: PoolFile) -> None:
    Path(path).write_text(dumps(pool))


def load(path: str | Path) -> PoolFile:
    p = Path(path)
    if not p.exists():
        raise ValidationError(f"pool file not found: {path}")
    return loads(p.read_text())
