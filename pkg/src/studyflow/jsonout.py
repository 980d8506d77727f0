"""One canonical JSON byte form, shared by the CLI and the HTTP service.

Reports must compare byte-identical across both front ends, so every JSON
body funnels through this single encoder.
"""

from __future__ import annotations

import json


def canonical_json_bytes(payload) -> bytes:
    return (json.dumps(payload, indent=2, ensure_ascii=False) + "\n").encode("utf-8")
