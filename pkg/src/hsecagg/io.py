"""Plain-text headers and key=value records shared by the file formats."""
from __future__ import annotations

from .params import SystemParams

HEADER_KEYS = ("U", "V", "U0", "V0", "T", "q")


def parse_kv(line: str) -> dict[str, str]:
    out = {}
    for tok in line.split():
        key, sep, value = tok.partition("=")
        if not sep:
            raise ValueError(f"malformed token {tok!r} in {line!r}")
        out[key] = value
    return out


def parse_header(line: str) -> SystemParams:
    kv = parse_kv(line)
    missing = [k for k in HEADER_KEYS if k not in kv]
    if missing:
        raise ValueError(f"header is missing {missing}: {line!r}")
    q = None if kv["q"] == "auto" else int(kv["q"])
    return SystemParams(*(int(kv[k]) for k in HEADER_KEYS[:-1]), q=q)


def fmt_vec(values) -> str:
    return ",".join(str(int(x)) for x in values)


def parse_vec(text: str) -> list[int]:
    return [int(x) for x in text.split(",")] if text else []


def fmt_users(users) -> str:
    return "{" + ",".join(f"({u},{v})" for u, v in users) + "}"
