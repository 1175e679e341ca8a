"""JSON export of reports and value dumps."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping


def to_json(payload: Mapping[str, Any], *, indent: int | None = 2) -> str:
    return json.dumps(payload, indent=indent, sort_keys=False, ensure_ascii=False)


def write_json(payload: Mapping[str, Any], path: str | Path) -> Path:
    """Write ``payload`` to ``path``, creating parent directories."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(to_json(payload) + "\n", encoding="utf-8")
    return target
