"""Command line entry point: ``hsecagg <command> --config FILE [overrides]``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import keys as keys_mod
from . import mds as mds_mod
from .campaign import CampaignConfig, _coerce, load_config, run_campaign, select_patterns, with_overrides
from .dropout import DropoutPattern, sample, validate
from .errors import ConfigError, HSAError, InfeasibleParameters
from .protocol import plaintext_sum, run_session, sample_inputs
from .rates import region_for
from .security import sweep_security

OVERRIDES = ("U", "V", "U0", "V0", "T", "q", "seed", "mode", "samples", "colluder_cap",
             "policy", "inputs")


def _config(args) -> CampaignConfig:
    over = {k: getattr(args, k) for k in OVERRIDES}
    if args.config:
        return with_overrides(load_config(args.config), **over)
    return _coerce({k: v for k, v in over.items() if v is not None})


def _matrix(args, params):
    """Load --mds (re-certified unless --trust) or search for one."""
    if getattr(args, "mds", None):
        m = mds_mod.load(Path(args.mds).read_text(), trust=args.trust)
        if (m.params.U, m.params.V, m.params.U0, m.params.V0, m.params.T) != \
                (params.U, params.V, params.U0, params.V0, params.T):
            raise ConfigError(f"matrix file header {m.params.header()} does not match the config")
        return m
    return mds_mod.find_t_private_mds(params, seed=args.seed or 0, q=args.q).mds


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_rates(args) -> int:
    cfg = _config(args)
    region = region_for(cfg.U0, cfg.V0, cfg.T)
    print(f"U0={cfg.U0} V0={cfg.V0} T={cfg.T} {region.line()}")
    return 0 if region.feasible else 2


def cmd_find_mds(args) -> int:
    cfg = _config(args)
    res = mds_mod.find_t_private_mds(cfg.params(), seed=cfg.seed, q=cfg.q)
    _emit(mds_mod.dump(res.mds), args.out)
    print(f"q={res.q} canonical={str(res.canonical).lower()} attempts={res.attempts}",
          file=sys.stderr)
    return 0


def cmd_deal(args) -> int:
    cfg = _config(args)
    m = _matrix(args, cfg.params())
    _emit(keys_mod.dump(keys_mod.deal(m.params, m, cfg.seed)), args.out)
    return 0


def cmd_simulate(args) -> int:
    cfg = _config(args)
    m = _matrix(args, cfg.params())
    params = m.params
    if args.pattern:
        pat = DropoutPattern.parse(args.pattern)
        bad = validate(params, pat)
        if bad:
            raise ConfigError(f"pattern: {'; '.join(bad)}")
    else:
        pat = sample(params, cfg.seed)
    km = keys_mod.deal(params, m, cfg.seed)
    W = sample_inputs(params, cfg.seed)
    tr = run_session(params, km, W, pat, cfg.policy, cfg.seed)
    ok = bool(np.array_equal(tr.decoded, plaintext_sum(params, W, tr.S1))) and tr.surplus_consistent
    _emit(tr.dump() + f"pass={str(ok).lower()}\n", args.out)
    return 0 if ok else 1


def cmd_verify_security(args) -> int:
    cfg = _config(args)
    m = _matrix(args, cfg.params())
    params = m.params
    if args.pattern:
        patterns = [DropoutPattern.parse(args.pattern)]
    else:
        patterns, _, _ = select_patterns(params, cfg)
    rep = sweep_security(params, m, enumerate(patterns), cfg.policy, cfg.seed,
                         cfg.colluder_cap, masked=not args.no_mask, strict=args.strict)
    lines = rep.failures() if args.failures_only else rep.records
    _emit("".join(r.line() + "\n" for r in lines), args.out)
    print(f"records={len(rep.records)} failures={len(rep.failures())} "
          f"colluder_sets={rep.colluder_sets} exhaustive={str(rep.exhaustive_colluders).lower()}",
          file=sys.stderr)
    return 0 if rep.passed else 1


def cmd_campaign(args) -> int:
    cfg = _config(args)
    res = run_campaign(cfg, outdir=args.out, security=not args.no_security)
    sys.stdout.write(res.summary)
    return res.status


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value config file")
    for k in ("U", "V", "U0", "V0", "T", "seed", "samples", "inputs"):
        common.add_argument(f"--{k}", type=int)
    common.add_argument("--q", type=lambda s: None if s == "auto" else int(s))
    common.add_argument("--mode")
    common.add_argument("--colluder-cap", dest="colluder_cap", type=int)
    common.add_argument("--policy")
    common.add_argument("--out", help="output file (directory for campaign)")
    common.add_argument("-v", "--verbose", action="store_true")

    matrix = argparse.ArgumentParser(add_help=False)
    matrix.add_argument("--mds", help="matrix file from find-mds")
    matrix.add_argument("--trust", action="store_true", help="skip re-certification on import")

    p = argparse.ArgumentParser(prog="hsecagg", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("rates", parents=[common], help="optimal rate region").set_defaults(fn=cmd_rates)
    sub.add_parser("find-mds", parents=[common], help="search a certified matrix").set_defaults(fn=cmd_find_mds)
    sub.add_parser("deal", parents=[common, matrix], help="deal and export keys").set_defaults(fn=cmd_deal)
    s = sub.add_parser("simulate", parents=[common, matrix], help="run one session")
    s.add_argument("--pattern", help="pattern line, e.g. 'U1=3 U2=3 V1=1,1 V2=1,1'")
    s.set_defaults(fn=cmd_simulate)
    s = sub.add_parser("verify-security", parents=[common, matrix], help="relay and server checks")
    s.add_argument("--pattern")
    s.add_argument("--no-mask", action="store_true", help="negative control: X1 = W")
    s.add_argument("--strict", action="store_true", help="add colluder uploads to relay views")
    s.add_argument("--failures-only", action="store_true")
    s.set_defaults(fn=cmd_verify_security)
    s = sub.add_parser("campaign", parents=[common], help="full verification pipeline")
    s.add_argument("--no-security", action="store_true")
    s.set_defaults(fn=cmd_campaign)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.fn(args)
    except InfeasibleParameters as e:
        print(f"refused: {e}", file=sys.stderr)
        return 2
    except (ConfigError, HSAError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
