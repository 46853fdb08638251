"""Command line for exporting and checking QTPE embedding tables.

Subcommands: export (build a table from a checkpoint) and verify
(parse an existing table and print its summary). The vocabulary comes
either from a text file, one token per line, or from a scan over a
JSONL dataset's text fields. Every export writes a JSON sidecar report
next to the table and prints the table's sha256 digest. Exit codes:
0 success, 1 model load failure, 2 anything wrong with the request or
the file.
"""

from __future__ import annotations

import argparse
import json
import string
import sys

from .errors import FormatError, JobError, ModelError
from .extract import ExportJob, run_export
from .format import file_digest, read_table


def read_vocab_file(path: str) -> list[str]:
    """One token per line; blank lines are ignored, order is kept."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return [line.strip() for line in fh if line.strip()]
    except OSError as exc:
        raise JobError(f"cannot read vocabulary file: {exc}") from exc


def scan_dataset(path: str) -> list[str]:
    """Sorted unique tokens from a JSONL dataset's text fields.

    Tokens are lowercased, split on whitespace, and stripped of
    surrounding ASCII punctuation, matching what the consumer of the
    table will look up. An optional {"classes": C} header line is
    ignored.
    """
    tokens: set[str] = set()
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise JobError(f"cannot read dataset: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise JobError(
                    f"{path}: line {lineno}: invalid JSON ({exc.msg})"
                ) from exc
            if (
                lineno == 1
                and isinstance(record, dict)
                and "classes" in record
                and "id" not in record
            ):
                continue
            if not isinstance(record, dict) or "text" not in record:
                raise JobError(
                    f"{path}: line {lineno}: expected an object with a text field"
                )
            for raw in str(record["text"]).lower().split():
                token = raw.strip(string.punctuation)
                if token:
                    tokens.add(token)
    return sorted(tokens)


def run_export_command(args: argparse.Namespace) -> int:
    if args.vocab is not None:
        vocab = read_vocab_file(args.vocab)
    else:
        vocab = scan_dataset(args.dataset)
    job = ExportJob(model=args.model, vocab=vocab, output=args.out, dim=args.dim)
    report = run_export(job)
    sidecar = args.report or args.out + ".report.json"
    with open(sidecar, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")
    print(
        f"wrote {report.written}/{report.requested} tokens "
        f"(dim {report.dim}) to {report.output}"
    )
    print(f"sha256 {report.sha256}")
    return 0


def run_verify(args: argparse.Namespace) -> int:
    dim, records = read_table(args.path)
    print(f"{args.path}: {len(records)} tokens, dim {dim}")
    print(f"sha256 {file_digest(args.path)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embexport",
        description="Export pretrained transformer token embeddings to QTPE tables.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    exp = sub.add_parser("export", help="export token embeddings from a checkpoint")
    exp.add_argument("--model", required=True, help="checkpoint id or local path")
    source = exp.add_mutually_exclusive_group(required=True)
    source.add_argument("--vocab", help="text file, one token per line")
    source.add_argument("--dataset", help="JSONL dataset to scan for tokens")
    exp.add_argument("--out", required=True, help="output QTPE path")
    exp.add_argument(
        "--dim",
        type=int,
        default=None,
        help="expected embedding width; must match the model when given",
    )
    exp.add_argument(
        "--report",
        default=None,
        help="sidecar report path (default: <out>.report.json)",
    )
    ver = sub.add_parser("verify", help="parse a QTPE file and print its summary")
    ver.add_argument("path")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "export":
            return run_export_command(args)
        return run_verify(args)
    except (JobError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ModelError as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
