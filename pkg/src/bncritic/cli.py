"""Command-line surface: validate, sample, score, criticize, study.

Exit codes: 0 = success, 1 = validation findings, 2 = usage/parse/I-O errors.
All randomness flows from a single --seed flag; outputs embed provenance
(tool version, seed, config hash) so runs can be reproduced from the files.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import corpus, critic, sample, score
from ._version import __version__
from .critic import Correction, ScoreKind, StudyConfig, TailMode
from .errors import BnCriticError, ParseError, ValidationError
from .network import load_network, network_id, validate

_TAIL_FLAG = {"two": TailMode.TWO_TAILED, "one": TailMode.ONE_TAILED_MISFIT}
_CORRECTION_FLAG = {"none": Correction.NONE, "per-family": Correction.PER_FAMILY}
_INDEX_FLAG = {
    "weaver": ScoreKind.WEAVER_SURPRISE,
    "goodlog": ScoreKind.GOOD_LOG,
    "rps": ScoreKind.RANKED_PROBABILITY,
}


def _provenance(seed: int, config: dict) -> dict:
    blob = json.dumps(config, sort_keys=True).encode()
    return {
        "tool": "bncritic",
        "version": __version__,
        "seed": seed,
        "config": config,
        "config_hash": hashlib.sha256(blob).hexdigest()[:16],
    }


def _load_net(path: str):
    return load_network(Path(path).read_bytes())


def cmd_validate(args) -> int:
    try:
        data = Path(args.network).read_bytes()
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    from .network import Network, _parse_cpt, _parse_variable  # parse without raising on validation

    try:
        doc = json.loads(data.decode("utf-8"))
        if not isinstance(doc, dict) or "variables" not in doc or "cpts" not in doc:
            raise ParseError("top-level object must have 'variables' and 'cpts'")
        variables = tuple(_parse_variable(v, i) for i, v in enumerate(doc["variables"]))
        cpts = tuple(_parse_cpt(c, i) for i, c in enumerate(doc["cpts"]))
    except (ParseError, UnicodeDecodeError, json.JSONDecodeError) as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 2
    report = validate(Network(variables, cpts))
    for f in report.findings:
        print(f"{f.severity}: {f.code} at {f.location}: {f.message}")
    return 0 if report.ok else 1


def cmd_sample(args) -> int:
    net = _load_net(args.network)
    ds = sample.forward_sample(net, args.n, args.seed)
    out = Path(args.out)
    out.write_text(sample.save_dataset(ds, net))
    meta = _provenance(args.seed, {"n": args.n, "network": network_id(net)})
    meta["network_id"] = network_id(net)
    meta["n"] = args.n
    out.with_suffix(out.suffix + ".meta.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_score(args) -> int:
    kind = _INDEX_FLAG[args.index]
    baseline = None
    if args.baseline:
        baseline = np.asarray([float(x) for x in args.baseline.split(",")])
    if kind == ScoreKind.GOOD_LOG and baseline is None:
        print("error: --baseline is required for the goodlog index", file=sys.stderr)
        return 2
    text = Path(args.forecasts).read_text()
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header[-1] != "observed":
        print("error: last column must be 'observed' (0-based state index)", file=sys.stderr)
        return 2
    lines = ["score"]
    for row in reader:
        probs = np.asarray([float(x) for x in row[:-1]])
        observed = int(row[-1])
        if kind == ScoreKind.WEAVER_SURPRISE:
            val = score.weaver_surprise(probs, observed)
        elif kind == ScoreKind.GOOD_LOG:
            val = score.good_log_score(probs, observed, baseline)
        else:
            val = score.ranked_probability_score(probs, observed)
        lines.append(repr(val))
    output = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(output)
    else:
        sys.stdout.write(output)
    return 0


def _write_report(report, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(report.to_json())
    (out_dir / "summary.txt").write_text(report.summary_text())
    plots = out_dir / "plots"
    plots.mkdir(exist_ok=True)
    for (kind, level), text in report.plot_csvs().items():
        (plots / f"{kind}_{level}.csv").write_text(text)


def cmd_criticize(args) -> int:
    net = _load_net(args.network)
    observed = sample.load_dataset(Path(args.dataset).read_text(), net)
    sizes = tuple(int(s) for s in args.sizes.split(","))
    cfg = StudyConfig(
        sample_sizes=sizes,
        replicates=args.replicates,
        pool_size=args.pool_size,
        tail=_TAIL_FLAG[args.tail],
        correction=_CORRECTION_FLAG[args.correction],
        master_seed=args.seed,
    )
    kinds = [_INDEX_FLAG[i] for i in args.index] if args.index else None
    report = critic.criticize(net, observed, cfg, kinds)
    report.provenance.update(_provenance(args.seed, cfg.to_dict()))
    _write_report(report, Path(args.out_dir))
    return 0


def cmd_study(args) -> int:
    if args.config:
        cfg = StudyConfig.from_dict(json.loads(Path(args.config).read_text()))
        if args.seed is not None:
            cfg = StudyConfig.from_dict({**cfg.to_dict(), "master_seed": args.seed})
    else:
        cfg = StudyConfig(master_seed=args.seed if args.seed is not None else 0)
    kinds = tuple(_INDEX_FLAG[i] for i in args.index) if args.index else None

    start = time.monotonic()
    result = corpus.run_study(cfg, kinds)
    elapsed = time.monotonic() - start

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    prov = _provenance(cfg.master_seed, cfg.to_dict())
    (out / "study_config.json").write_text(json.dumps(prov, indent=2, sort_keys=True) + "\n")

    base = result.networks["Data Generation"]
    (out / "observed.csv").write_text(sample.save_dataset(result.observed, base))
    (out / "observed.csv.meta.json").write_text(json.dumps(
        {**prov, "network_id": network_id(base), "n": result.observed.n_rows},
        indent=2, sort_keys=True) + "\n")

    for name, report in result.reports.items():
        slug = name.lower().replace(" ", "_")
        report.provenance.update(prov)
        _write_report(report, out / "models" / slug)

    for kind, grid in result.grids.items():
        (out / f"grid_{kind.value}.txt").write_text(
            f"# provenance: {json.dumps(prov, sort_keys=True)}\n" + grid.to_text())
        (out / f"grid_{kind.value}.json").write_text(grid.to_json())

    print(f"study complete in {elapsed:.1f}s; outputs in {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bncritic",
                                description="Model criticism for BNs with latent variables")
    p.add_argument("--version", action="version", version=f"bncritic {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="validate a network file")
    v.add_argument("network")
    v.set_defaults(func=cmd_validate)

    s = sub.add_parser("sample", help="forward-sample a dataset from a network")
    s.add_argument("network")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sample)

    sc = sub.add_parser("score", help="score a CSV of forecasts (probabilities + observed index)")
    sc.add_argument("forecasts")
    sc.add_argument("--index", choices=sorted(_INDEX_FLAG), required=True)
    sc.add_argument("--baseline", help="comma-separated baseline marginals (goodlog only)")
    sc.add_argument("--out")
    sc.set_defaults(func=cmd_score)

    c = sub.add_parser("criticize", help="criticize a network against an observed dataset")
    c.add_argument("network")
    c.add_argument("dataset")
    c.add_argument("--sizes", default="50,100,250,500,1000")
    c.add_argument("--replicates", type=int, default=1000)
    c.add_argument("--pool-size", type=int, default=1000)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--index", action="append", choices=sorted(_INDEX_FLAG))
    c.add_argument("--tail", choices=("two", "one"), default="two")
    c.add_argument("--correction", choices=("none", "per-family"), default="none")
    c.add_argument("--out-dir", required=True)
    c.set_defaults(func=cmd_criticize)

    st = sub.add_parser("study", help="run the full corpus criticism study")
    st.add_argument("--seed", type=int, default=None)
    st.add_argument("--out-dir", required=True)
    st.add_argument("--config", help="JSON study config file")
    st.add_argument("--index", action="append", choices=sorted(_INDEX_FLAG))
    st.set_defaults(func=cmd_study)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValidationError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except BnCriticError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
