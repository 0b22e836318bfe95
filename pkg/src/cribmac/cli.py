"""Command-line front end: ``region``, ``simulate``, ``secrecy`` and ``chain``.

Every command reads one JSON config (``"schema_version": 1``). Outputs are
written only after the whole computation succeeds; every CSV starts with a
``# config-sha256: ...`` line and every JSON output carries the same hash. On
failure a JSON error object is printed to stderr and the exit status is 1.

Seeds: the config seed (or ``--seed``) is the root. Monte Carlo trial t uses
``derive_seed(seed, t)``; codebook layers add fixed integer tags to it.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from pathlib import Path

import numpy as np

from .block_markov import BlockConfig, RhoAllocation, default_allocation, effective_rates, simulate_chain
from .channels import (
    AuxLaw,
    JointLaw,
    MacChannel,
    Scenario,
    WiretapMac,
    full_joint,
    induced_output,
    law_from_json,
    load_channel,
)
from .errors import CribmacError
from .probability import ProbVector
from .regions import DistributionSearchConfig, union_region_estimate
from .resolvability import CodebookConfig, mc_expected_kl
from .secrecy import SecrecyCodeConfig, simulate_secrecy

SCHEMA_VERSION = 1


class ConfigError(CribmacError, ValueError):
    """Malformed or incomplete experiment config."""


def _require(cfg: dict, *keys: str) -> None:
    missing = [k for k in keys if k not in cfg]
    if missing:
        raise ConfigError(f"config is missing {missing}")


def load_config(path: str | Path, seed: int | None = None) -> dict:
    """Read a config and inline the channel so the hash covers everything used."""
    path = Path(path)
    cfg = json.loads(path.read_text())
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    if cfg.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {cfg.get('schema_version')!r}")
    _require(cfg, "channel")
    if isinstance(cfg["channel"], str):
        chan_path = (path.parent / cfg["channel"]).resolve()
        if not chan_path.is_file():
            raise ConfigError(f"channel file {cfg['channel']!r} does not exist")
        cfg["channel"] = json.loads(chan_path.read_text())
    if seed is not None:
        cfg["seed"] = seed
    cfg.setdefault("seed", 0)
    return cfg


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, Scenario):
        return obj.value
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _json_text(payload: dict, digest: str) -> str:
    body = {"schema_version": SCHEMA_VERSION, "config_sha256": digest} | payload
    return json.dumps(body, indent=2, sort_keys=True, default=_jsonable) + "\n"


def _csv_text(header: list[str], rows: list[list], digest: str) -> str:
    buf = io.StringIO()
    buf.write(f"# config-sha256: {digest}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _target(cfg: dict, mac: MacChannel, law=None) -> ProbVector | None:
    if "target" in cfg:
        return ProbVector(cfg["target"])
    if law is not None:
        return induced_output(mac, law)
    return None


def _law(cfg: dict):
    _require(cfg, "law")
    return law_from_json(cfg["law"])


def cmd_region(cfg: dict) -> dict[str, str]:
    _require(cfg, "scenario")
    digest = config_hash(cfg)
    channel = load_channel(cfg["channel"])
    kind = cfg.get("kind", "resolvability")
    mac = channel.eavesdropper if isinstance(channel, WiretapMac) else channel
    search = DistributionSearchConfig(
        mode=cfg.get("mode", "target-Q"),
        grid_steps=int(cfg.get("grid_steps", 10)),
        samples=int(cfg.get("samples", 64)),
        u_cardinality_cap=cfg.get("u_cardinality_cap"),
        seed=int(cfg["seed"]),
        bound=cfg.get("bound", "inner"),
    )
    est = union_region_estimate(channel, cfg["scenario"], _target(cfg, mac), search, kind)
    rows = [[p.r1, p.r2, p.law_id] for p in est.frontier]
    return {
        "frontier.csv": _csv_text(["r1", "r2", "law_id"], rows, digest),
        "laws.json": _json_text({"command": "region", "kind": kind,
                                 "scenario": Scenario.parse(cfg["scenario"]).value}
                                | est.to_json(), digest),
    }


def cmd_simulate(cfg: dict) -> dict[str, str]:
    _require(cfg, "scenario", "rates", "n_list")
    digest = config_hash(cfg)
    channel = load_channel(cfg["channel"])
    mac = channel.eavesdropper if isinstance(channel, WiretapMac) else channel
    law = _law(cfg)
    target = _target(cfg, mac, law)
    trials = int(cfg.get("trials", 20))
    r1, r2 = (float(v) for v in cfg["rates"])
    decay, per_trial = [], []
    for n in cfg["n_list"]:
        code = CodebookConfig(cfg["scenario"], int(n), r1, r2, law, int(cfg["seed"]))
        rep = mc_expected_kl(code, mac, target, trials)
        decay.append([int(n), r1, r2, trials, rep.mean, rep.stderr])
        per_trial += [[t, int(n), r1, r2, v] for t, v in enumerate(rep.per_trial)]
    return {
        "decay.csv": _csv_text(["n", "r1", "r2", "trials", "mean_kl_bits", "stderr_bits"],
                               decay, digest),
        "trials.csv": _csv_text(["trial", "n", "r1", "r2", "kl_bits"], per_trial, digest),
    }


def cmd_secrecy(cfg: dict) -> dict[str, str]:
    _require(cfg, "scenario", "rates")
    digest = config_hash(cfg)
    channel = load_channel(cfg["channel"])
    if not isinstance(channel, WiretapMac):
        raise ConfigError("the secrecy command needs a wiretap channel ('wyz')")
    law = _law(cfg)
    scenario = Scenario.parse(cfg["scenario"])
    r1, r2 = (float(v) for v in cfg["rates"])
    eps = float(cfg.get("epsilon", 0.5))
    seed = int(cfg["seed"])
    configs = []
    if scenario is Scenario.STRICTLY_CAUSAL:
        _require(cfg, "r", "B", "rho")
        rho1p, rho1pp, rho2 = (float(v) for v in cfg["rho"])
        for r in cfg["r"] if isinstance(cfg["r"], list) else [cfg["r"]]:
            configs.append(SecrecyCodeConfig(scenario, r1, r2, law, seed, eps, r=int(r),
                                             B=int(cfg["B"]), rho1p=rho1p, rho1pp=rho1pp,
                                             rho2=rho2))
    else:
        _require(cfg, "n_list", "dither")
        r1p, r2p = (float(v) for v in cfg["dither"])
        configs = [SecrecyCodeConfig(scenario, r1, r2, law, seed, eps, n=int(n), r1p=r1p, r2p=r2p)
                   for n in cfg["n_list"]]
    reports = [simulate_secrecy(c, channel) for c in configs]
    rows = []
    for c, rep in zip(configs, reports):
        d1 = c.rho1p + c.rho1pp if scenario is Scenario.STRICTLY_CAUSAL else c.r1p
        d2 = c.rho2 if scenario is Scenario.STRICTLY_CAUSAL else c.r2p
        rows.append([c.length, r1, r2, d1, d2, rep.p_error, rep.leakage_bits,
                     rep.resolvability_bound_bits])
    header = ["n", "R1", "R2", "R1p", "R2p", "p_error", "leakage_bits", "resolvability_bound_bits"]
    return {
        "secrecy_report.json": _json_text({"command": "secrecy",
                                           "reports": [r.to_json() for r in reports]}, digest),
        "sweep.csv": _csv_text(header, rows, digest),
    }


def _trivial_u(law: JointLaw) -> AuxLaw:
    """A product joint law written with |U| = 1."""
    p1, p2 = law.p.sum(axis=1), law.p.sum(axis=0)
    if not np.allclose(law.p, np.outer(p1, p2), atol=1e-12):
        raise ConfigError("chain needs an aux law or a product law")
    return AuxLaw.independent(p1, p2)


def cmd_chain(cfg: dict) -> dict[str, str]:
    _require(cfg, "r", "B")
    digest = config_hash(cfg)
    channel = load_channel(cfg["channel"])
    mac = channel.eavesdropper if isinstance(channel, WiretapMac) else channel
    law = _law(cfg)
    if isinstance(law, JointLaw):
        law = _trivial_u(law)
    if "alloc" in cfg:
        alloc = RhoAllocation(**cfg["alloc"])
    else:
        alloc = default_allocation(full_joint(mac, law), float(cfg.get("alloc_epsilon", 0.05)),
                                   float(cfg.get("gamma", 1.0)))
    block = BlockConfig(int(cfg["r"]), int(cfg["B"]), alloc, law, int(cfg["seed"]),
                        float(cfg.get("crib_epsilon", 0.5)))
    result = simulate_chain(block, mac, _target(cfg, mac, law), cfg.get("coupling", "ideal"))
    rates = effective_rates(alloc)
    payload = {"command": "chain", "effective_rates": {"r1": rates.r1, "r2": rates.r2}}
    return {"chain.json": _json_text(payload | result.to_json(), digest)}


COMMANDS = {"region": cmd_region, "simulate": cmd_simulate, "secrecy": cmd_secrecy,
            "chain": cmd_chain}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cribmac", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {"region": "per-law regions and the union frontier",
             "simulate": "Monte Carlo resolvability divergence versus n",
             "secrecy": "exact error probability and leakage of wiretap codes",
             "chain": "exact block-Markov chain diagnostics"}
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", required=True, help="output directory")
    return parser


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.seed)
        files = COMMANDS[args.command](cfg)
    except (CribmacError, ValueError, TypeError, KeyError, OSError, json.JSONDecodeError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc), "command": args.command}
        print(json.dumps(err), file=sys.stderr)
        return 1
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out / name).write_text(text)
    return 0


def main() -> None:
    sys.exit(run())
