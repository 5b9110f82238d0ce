"""Config parsing and the end-to-end verification campaign.

A campaign finds (or checks) the coding matrix, deals keys, runs a session
for every selected dropout pattern and input draw, sweeps the security
checks and compares measured rates with the optimal region.  Every report
is a deterministic function of the config.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field, fields
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from .dropout import (DEFAULT_ENUMERATION_CAP, count_patterns, enumerate_patterns,
                      sample_many)
from .errors import ConfigError, EnumerationTooLarge, InfeasibleParameters
from .io import fmt_vec
from .keys import DEFAULT_COLLUDER_CAP, deal, key_entropy_audit
from .mds import dump as dump_mds, find_t_private_mds
from .params import SystemParams
from .protocol import POLICIES, RateTuple, plaintext_sum, run_session, sample_inputs
from .rates import compare, fmt_rate, rate_region
from .security import Record, check_lemma2, sweep_security

log = logging.getLogger(__name__)

MODES = ("exhaustive", "sample")


@dataclass(frozen=True)
class CampaignConfig:
    U: int
    V: int
    U0: int
    V0: int
    T: int
    q: Optional[int] = None
    seed: int = 0
    mode: str = "exhaustive"
    samples: int = 1000
    colluder_cap: int = DEFAULT_COLLUDER_CAP
    policy: str = "lowest-index"
    inputs: int = 1

    def params(self) -> SystemParams:
        """SystemParams without q; raises InfeasibleParameters on U0*V0 <= T."""
        try:
            return SystemParams(self.U, self.V, self.U0, self.V0, self.T)
        except InfeasibleParameters:
            raise
        except ValueError as e:
            raise ConfigError(str(e)) from None

    def line(self) -> str:
        q = "auto" if self.q is None else self.q
        return (f"seed={self.seed} mode={self.mode} samples={self.samples} "
                f"colluder_cap={self.colluder_cap} policy={self.policy} inputs={self.inputs} q={q}")


CONFIG_KEYS = tuple(f.name for f in fields(CampaignConfig))
REQUIRED_KEYS = ("U", "V", "U0", "V0", "T")


def _coerce(values: dict) -> CampaignConfig:
    errors = []
    unknown = sorted(set(values) - set(CONFIG_KEYS))
    if unknown:
        errors.append(f"unknown keys: {', '.join(unknown)}")
    missing = [k for k in REQUIRED_KEYS if k not in values]
    if missing:
        errors.append(f"missing keys: {', '.join(missing)}")
    out = {}
    for key, raw in values.items():
        if key not in CONFIG_KEYS:
            continue
        raw = str(raw).strip()
        if key in ("mode", "policy"):
            allowed = MODES if key == "mode" else POLICIES
            if raw not in allowed:
                errors.append(f"{key}={raw!r} must be one of {', '.join(allowed)}")
            out[key] = raw
        elif key == "q" and raw == "auto":
            out[key] = None
        else:
            try:
                out[key] = int(raw)
            except ValueError:
                errors.append(f"{key}={raw!r} is not an integer")
    for key in ("samples", "colluder_cap", "inputs"):
        if isinstance(out.get(key), int) and out[key] < 1:
            errors.append(f"{key}={out[key]} must be positive")
    if errors:
        raise ConfigError("; ".join(errors))
    return CampaignConfig(**out)


def parse_config(text: str) -> CampaignConfig:
    """Flat ``key = value`` lines; blank lines and ``#`` comments are ignored."""
    values, errors = {}, []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            errors.append(f"line {n}: expected key=value, got {raw.strip()!r}")
        elif key in values:
            errors.append(f"line {n}: duplicate key {key}")
        else:
            values[key] = value.strip()
    if errors:
        raise ConfigError("; ".join(errors))
    return _coerce(values)


def load_config(path) -> CampaignConfig:
    return parse_config(Path(path).read_text())


def with_overrides(cfg: CampaignConfig, **overrides) -> CampaignConfig:
    """Apply non-None overrides, re-validating them like config values."""
    given = {k: v for k, v in overrides.items() if v is not None}
    if not given:
        return cfg
    base = {f.name: getattr(cfg, f.name) for f in fields(cfg)}
    base["q"] = "auto" if base["q"] is None else base["q"]
    base.update(given)
    return _coerce(base)


def select_patterns(params: SystemParams, cfg: CampaignConfig,
                    cap: int = DEFAULT_ENUMERATION_CAP):
    """(patterns, admissible count, exhaustive flag).

    Exhaustive mode falls back to ``samples`` seeded draws when the
    enumeration exceeds ``cap``.
    """
    total = count_patterns(params)
    if cfg.mode == "exhaustive":
        try:
            return list(enumerate_patterns(params, cap)), total, True
        except EnumerationTooLarge as e:
            log.warning("%s", e)
    return sample_many(params, cfg.samples, cfg.seed), total, False


@dataclass
class CampaignResult:
    status: int
    summary: str
    sessions: str = ""
    security: str = ""
    mds: str = ""
    passed: bool = False
    rates: Optional[RateTuple] = None
    counts: dict = dc_field(default_factory=dict)

    def write(self, outdir) -> None:
        out = Path(outdir)
        out.mkdir(parents=True, exist_ok=True)
        for name in ("summary", "sessions", "security", "mds"):
            (out / f"{name}.txt").write_text(getattr(self, name))


def refusal(cfg: CampaignConfig, err: Exception) -> CampaignResult:
    text = (f"U={cfg.U} V={cfg.V} U0={cfg.U0} V0={cfg.V0} T={cfg.T}\n"
            f"refused: {err}\nresult=refused\n")
    return CampaignResult(2, text)


def run_campaign(cfg: CampaignConfig, outdir=None, security: bool = True,
                 enumeration_cap: int = DEFAULT_ENUMERATION_CAP) -> CampaignResult:
    """Run the whole pipeline; status 0 iff every check passes, 2 on refusal."""
    try:
        params = cfg.params()
    except InfeasibleParameters as e:
        res = refusal(cfg, e)
        if outdir is not None:
            res.write(outdir)
        return res

    search = find_t_private_mds(params, seed=cfg.seed, q=cfg.q)
    params, mds = params.with_q(search.q), search.mds
    keys = deal(params, mds, cfg.seed)
    patterns, admissible, exhaustive = select_patterns(params, cfg, enumeration_cap)

    session_lines, ok_sessions = [], 0
    worst = {"X1": 0, "Y1": 0, "X2": 0, "Y2": 0}
    for pid, pat in enumerate(patterns):
        for j in range(cfg.inputs):
            W = sample_inputs(params, cfg.seed, (pid, j))
            tr = run_session(params, keys, W, pat, cfg.policy, cfg.seed)
            expected = plaintext_sum(params, W, tr.S1)
            ok = bool(np.array_equal(tr.decoded, expected)) and tr.surplus_consistent
            ok_sessions += ok
            for k, c in tr.symbol_counts().items():
                worst[k] = max(worst[k], c)
            session_lines.append(
                f"session pattern={pid} draw={j} {pat.line()} decoded={fmt_vec(tr.decoded)} "
                f"expected={fmt_vec(expected)} pass={str(ok).lower()}")
    n_sessions = len(session_lines)
    rates = RateTuple(*(Fraction(worst[k], params.L) for k in ("X1", "Y1", "X2", "Y2")))
    region = rate_region(params)
    cmp = compare(tuple(rates), region)

    audit = key_entropy_audit(params, mds, cfg.colluder_cap, cfg.seed)
    sec_records = [Record("tprivacy", "-", None, e.colluders, e.t_privacy_mi + e.key_independence_mi)
                   for e in audit.entries]
    sweep = None
    if security:
        sweep = sweep_security(params, mds, enumerate(patterns), cfg.policy, cfg.seed,
                               cfg.colluder_cap)
        sec_records += sweep.records
        for e in check_lemma2(params, mds):
            tag = ",".join(map(str, e.users)) + "/" + ",".join(map(str, e.per_relay))
            sec_records.append(Record("lemma2", tag, None, (), e.mi))
    sec_fail = [r for r in sec_records if not r.passed]

    def tally(kind):
        recs = [r for r in sec_records if r.kind == kind]
        return f"{kind}: records={len(recs)} failures={sum(not r.passed for r in recs)}"

    passed = ok_sessions == n_sessions and cmp.passed and not sec_fail
    distinct = len(set(patterns))
    summary = [
        params.header(),
        cfg.line(),
        f"mds q={search.q} canonical={str(search.canonical).lower()} attempts={search.attempts}",
        f"patterns evaluated={len(patterns)} distinct={distinct} admissible={admissible} "
        f"exhaustive={str(exhaustive).lower()} coverage={distinct}/{admissible}",
        f"sessions total={n_sessions} passed={ok_sessions}",
        f"rates measured={rates}",
        f"region {region.line()}",
        *cmp.lines(),
        f"note Rx2 achieved/converse={fmt_rate(region.rx2_min)} "
        f"stated corner={fmt_rate(region.rx2_stated)}",
    ]
    if sweep is not None:
        summary.append(f"security colluder_sets={sweep.colluder_sets} "
                       f"exhaustive={str(sweep.exhaustive_colluders).lower()} "
                       f"views={sweep.views_evaluated}")
        summary += [tally(k) for k in ("relay", "server", "tprivacy", "lemma2")]
    else:
        summary += ["security skipped", tally("tprivacy")]
    summary.append(f"result={'pass' if passed else 'fail'}")
    res = CampaignResult(
        0 if passed else 1,
        "\n".join(summary) + "\n",
        "\n".join(session_lines) + "\n",
        "\n".join(r.line() for r in sec_records) + "\n",
        dump_mds(mds),
        passed,
        rates,
        {"patterns": len(patterns), "admissible": admissible, "sessions": n_sessions,
         "sessions_passed": ok_sessions, "security_failures": len(sec_fail)},
    )
    if outdir is not None:
        res.write(outdir)
    return res
