#!/usr/bin/env python3
"""End-to-end demo: synthesize a dataset, train the fusion head, score it.

Chains the qtext subcommands the way a real experiment would, with all
artifacts under one directory:

    demo/
      data.jsonl
      train/   head.qtph, history.csv, manifest.json
      eval/    metrics.json, run_log.csv, manifest.json
"""

import argparse
import json
import os
import sys

from qtext.cli import main as qtext
from qtext.data import synthetic_separable_dataset, write_dataset


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="demo", help="artifact directory")
    parser.add_argument("--examples", type=int, default=200)
    parser.add_argument("--n-qubits", type=int, default=4)
    parser.add_argument("--dim", type=int, default=16,
                        help="hash embedding width")
    parser.add_argument("--lr", type=float, default=0.05)
    parser.add_argument("--epochs", type=int, default=50)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    os.makedirs(args.out, exist_ok=True)
    dataset = os.path.join(args.out, "data.jsonl")
    examples = synthetic_separable_dataset(
        n_examples=args.examples, seed=args.seed)
    write_dataset(dataset, examples, n_classes=2)
    print(f"dataset: {len(examples)} examples -> {dataset}")

    train_dir = os.path.join(args.out, "train")
    rc = qtext(["train", "--dataset", dataset,
                "--dim", str(args.dim), "--n-qubits", str(args.n_qubits),
                "--lr", str(args.lr), "--epochs", str(args.epochs),
                "--seed", str(args.seed), "--out", train_dir])
    if rc:
        return rc

    eval_dir = os.path.join(args.out, "eval")
    rc = qtext(["eval", "--dataset", dataset,
                "--checkpoint", os.path.join(train_dir, "head.qtph"),
                "--dim", str(args.dim), "--n-qubits", str(args.n_qubits),
                "--seed", str(args.seed), "--out", eval_dir])
    if rc:
        return rc

    with open(os.path.join(eval_dir, "metrics.json"), encoding="utf-8") as fh:
        metrics = json.load(fh)
    print(f"demo metrics: {json.dumps(metrics)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
