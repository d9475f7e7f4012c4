"""Canonical JSON serialization, content hashing, and clock helpers.

All persisted documents and content hashes go through canonical_dumps so
that identical logical content always yields identical bytes.
"""

from __future__ import annotations

import hashlib
import json
from datetime import datetime, timezone
from typing import Any


def canonical_dumps(obj: Any) -> str:
    """Serialize with sorted keys and fixed separators."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def pretty_dumps(obj: Any) -> str:
    """Stable human-readable form used for files written to disk."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def content_hash(obj: Any) -> str:
    """sha256 over the canonical serialization."""
    return hashlib.sha256(canonical_dumps(obj).encode("utf-8")).hexdigest()


def utc_now() -> str:
    """Current time as an ISO-8601 UTC timestamp with second precision."""
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
