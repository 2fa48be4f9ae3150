"""Command-line entry points for dataset generation, evaluation, and training.

Subcommands: gen, eval-type1, eval-type2, train, eval-nn, complexity,
report. Exit code 0 on success; failures print one machine-parsable line
``error:<class>: <message>`` to stderr and exit nonzero.
"""

import argparse
import csv
import sys
import time
from pathlib import Path

import numpy as np

from . import dataio, type1, type2
from .channel import synth_dataset
from .config import load_config
from .errors import ConfigError, ImcsiError
from .metrics import column_similarities
from .nn.checkpoint import load_checkpoint, save_checkpoint
from .nn.complexity import closed_form_flops, closed_form_params, count_params_flops
from .nn.models import FeedbackModel
from .nn.training import evaluate, train
from .report import ReportRow, read_report, write_report


def _load_targets(path, scene=None):
    """Eigen dataset as complex128 (count, nt, ns); validates scene dims."""
    data = dataio.read_dataset(path)
    if data.kind == "channel":
        raise ConfigError(f"{path} holds channel tensors, expected eigen targets")
    samples = data.samples.astype(np.complex128)
    if data.kind == "eigen_single":
        samples = samples[:, :, None]
    if scene is not None:
        if data.nt != scene.array.nt or (
            data.kind == "eigen_multi" and data.ns != scene.n_subbands
        ):
            raise ConfigError(
                f"{path} dims (nt={data.nt}, ns={data.ns}) do not match the scene"
            )
    return data, samples


def _dataset_prefix_paths(prefix):
    prefix = Path(prefix)
    return {s: prefix.parent / f"{prefix.name}_{s}.csif" for s in ("train", "val", "test")}


def cmd_gen(args) -> int:
    cfg = load_config(args.config, seed_override=args.seed)
    count = args.count if args.count is not None else cfg.dataset.count
    build = synth_dataset(
        cfg.scene,
        count,
        cfg.dataset.split,
        args.out,
        prefix=cfg.dataset.prefix,
        save_channels=args.save_channels or cfg.dataset.save_channels,
    )
    for split, path in build.eigen_paths.items():
        print(f"{split}: {path} samples={build.counts[split]} sha256={dataio.file_digest(path)}")
    for split, path in build.channel_paths.items():
        print(f"{split}-channel: {path} sha256={dataio.file_digest(path)}")
    return 0


def cmd_eval_type1(args) -> int:
    cfg = load_config(args.config, seed_override=args.seed)
    data, samples = _load_targets(args.data, cfg.scene)
    array = cfg.scene.array
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    start = time.perf_counter()
    n_subbands = samples.shape[2]
    rows = []
    rho_sum = 0.0
    for i in range(samples.shape[0]):
        pmis, sims = type1.encode_dataset(samples[i].T, array)
        rho = float(sims.mean())
        rho_sum += rho
        rows.append((i, " ".join(str(p.flat_index) for p in pmis), rho))
    wall = time.perf_counter() - start

    with open(out_dir / "type1_pmi.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample", "pmi", "rho"])
        writer.writerows(rows)

    bits = type1.overhead_type1(array) * n_subbands
    rho = rho_sum / max(len(rows), 1)
    row = ReportRow("type1", n_bits=bits, rho=rho, wall_seconds=wall)
    write_report(out_dir / f"report.{cfg.report_format}", [row], cfg.report_format)
    print(f"type1: samples={len(rows)} rho={rho:.4f} bits={bits}")
    return 0


def cmd_eval_type2(args) -> int:
    cfg = load_config(args.config, seed_override=args.seed)
    data, samples = _load_targets(args.data, cfg.scene)
    if data.kind != "eigen_multi":
        raise ConfigError("the high-resolution codebook evaluates eigen_multi datasets")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    start = time.perf_counter()
    reports, sims = type2.encode_dataset(samples, cfg.scene.array, cfg.type2)
    wall = time.perf_counter() - start

    with open(out_dir / "type2_reports.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample", "bit_cost", "rho"])
        for i, (rep, rho) in enumerate(zip(reports, sims)):
            writer.writerow([i, rep.bit_cost, float(rho)])

    mean_bits = float(np.mean([r.bit_cost for r in reports])) if reports else 0.0
    rho = float(sims.mean()) if len(sims) else 0.0
    row = ReportRow("type2", n_bits=mean_bits, rho=rho, wall_seconds=wall)
    write_report(out_dir / f"report.{cfg.report_format}", [row], cfg.report_format)
    print(f"type2: samples={len(reports)} rho={rho:.4f} mean_bits={mean_bits:.1f}")
    return 0


def cmd_train(args) -> int:
    cfg = load_config(args.config, seed_override=args.seed)
    paths = _dataset_prefix_paths(args.data)
    _, train_targets = _load_targets(paths["train"], cfg.scene)
    _, val_targets = _load_targets(paths["val"], cfg.scene)
    test_targets = None
    if paths["test"].exists():
        _, test_targets = _load_targets(paths["test"], cfg.scene)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    sweep = args.n_bits or [0]
    rows = []
    for n_bits in sweep:
        spec = cfg.model_spec(n_bits=n_bits)
        if args.epochs is not None:
            cfg.train.epochs = args.epochs
        model = FeedbackModel(spec, init_seed=cfg.model.init_seed)
        start = time.perf_counter()
        model, history = train(model, train_targets, val_targets, cfg.train)
        wall = time.perf_counter() - start

        tag = spec.n_bits
        save_checkpoint(out_dir / f"model_{tag}.ckpt", model)
        with open(out_dir / f"history_{tag}.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["epoch", "train_loss", "val_loss", "lr"])
            for h in history:
                writer.writerow([h["epoch"], repr(h["train_loss"]), repr(h["val_loss"]), repr(h["lr"])])

        if test_targets is not None:
            rep = evaluate(model, test_targets)
            params, flops = count_params_flops(spec)
            rows.append(
                ReportRow(spec.architecture, spec.n_bits, rep.rho, params, flops, wall)
            )
            print(f"{spec.architecture}: n_bits={spec.n_bits} test_rho={rep.rho:.4f}")
        else:
            print(f"{spec.architecture}: n_bits={spec.n_bits} trained (no test split)")
    if rows:
        write_report(out_dir / f"report.{cfg.report_format}", rows, cfg.report_format)
    return 0


def cmd_eval_nn(args) -> int:
    cfg = load_config(args.config, seed_override=args.seed) if args.config else None
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = _dataset_prefix_paths(args.data)
    _, test_targets = _load_targets(paths["test"], cfg.scene if cfg else None)

    rows = []
    for ckpt in args.checkpoint:
        model = load_checkpoint(ckpt)
        if model.spec.nt * model.spec.ns != test_targets.shape[1] * test_targets.shape[2]:
            raise ConfigError(f"{ckpt}: checkpoint dims do not match the dataset")
        start = time.perf_counter()
        rep = evaluate(model, test_targets)
        wall = time.perf_counter() - start
        params, flops = count_params_flops(model.spec)
        rows.append(
            ReportRow(model.spec.architecture, model.spec.n_bits, rep.rho, params, flops, wall)
        )
        print(f"{ckpt}: n_bits={model.spec.n_bits} rho={rep.rho:.4f}")
    fmt = cfg.report_format if cfg else "csv"
    write_report(out_dir / f"report.{fmt}", rows, fmt)
    return 0


def cmd_complexity(args) -> int:
    cfg = load_config(args.config, seed_override=args.seed)
    spec = cfg.model_spec(n_bits=(args.n_bits[0] if args.n_bits else 0))
    params, flops = count_params_flops(spec)
    print("architecture,n_bits,params,flops")
    print(f"{spec.architecture},{spec.n_bits},{params},{flops}")
    if spec.hidden_scale == 1.0:
        closed_p = closed_form_params(spec)
        try:
            closed_f = closed_form_flops(spec)
        except ConfigError:
            closed_f = None
        agrees = closed_p == params and (closed_f is None or closed_f == flops)
        print(f"closed-form params={closed_p} flops={closed_f} agree={agrees}")
    return 0


def cmd_report(args) -> int:
    rows = []
    missing = []
    for run in args.runs:
        run = Path(run)
        candidates = [run / "report.csv", run / "report.json"]
        found = next((c for c in candidates if c.exists()), None)
        if found is None:
            missing.append(run.name)
            continue
        rows.extend(read_report(found))
    if missing:
        raise ConfigError(f"missing reports for runs: {', '.join(missing)}")
    fmt = args.format
    out = Path(args.out) / f"combined.{fmt}"
    write_report(out, rows, fmt)
    print(f"wrote {out} ({len(rows)} rows)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="imcsi", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", "--scene", dest="config", required=config_required,
                       help="experiment config file")
        p.add_argument("--seed", type=int, default=None, help="override the scene seed")
        p.add_argument("--out", default="runs/out", help="output directory")

    p = sub.add_parser("gen", help="synthesize a dataset (train/val/test files)")
    common(p)
    p.add_argument("--count", type=int, default=None, help="override sample count")
    p.add_argument("--save-channels", action="store_true", help="also write channel tensors")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("eval-type1", help="low-resolution codebook baseline")
    common(p)
    p.add_argument("--data", required=True, help="eigen dataset file")
    p.set_defaults(func=cmd_eval_type1)

    p = sub.add_parser("eval-type2", help="high-resolution codebook baseline")
    common(p)
    p.add_argument("--data", required=True, help="eigen_multi dataset file")
    p.set_defaults(func=cmd_eval_type2)

    p = sub.add_parser("train", help="train the configured architecture")
    common(p)
    p.add_argument("--data", required=True, help="dataset path prefix (expects _train/_val/_test)")
    p.add_argument("--n-bits", type=int, action="append", default=None,
                   help="feedback-bit budget; repeat for a sweep")
    p.add_argument("--epochs", type=int, default=None, help="override [train] epochs")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval-nn", help="evaluate checkpoints on a test split")
    common(p, config_required=False)
    p.add_argument("--data", required=True, help="dataset path prefix")
    p.add_argument("--checkpoint", action="append", required=True, help="checkpoint file (repeatable)")
    p.set_defaults(func=cmd_eval_nn)

    p = sub.add_parser("complexity", help="parameter/FLOP accounting for the configured model")
    common(p)
    p.add_argument("--n-bits", type=int, action="append", default=None)
    p.set_defaults(func=cmd_complexity)

    p = sub.add_parser("report", help="consolidate run reports into one table")
    p.add_argument("runs", nargs="+", help="run directories containing report.csv/json")
    p.add_argument("--out", default="runs", help="output directory")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ImcsiError as exc:
        print(f"error:{exc.error_code}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error:io: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
