#!/usr/bin/env python3
"""Generate a linearly separable synthetic JSONL dataset.

Each class draws from its own disjoint vocabulary, so mean hash
embeddings of the sentences are separable by construction. Useful for
training smoke runs without any external corpus.
"""

import argparse
import os

from qtext.data import synthetic_separable_dataset, write_dataset


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("output", help="destination JSONL path")
    parser.add_argument("--examples", type=int, default=200)
    parser.add_argument("--classes", type=int, default=2)
    parser.add_argument("--vocab-size", type=int, default=8,
                        help="words per class vocabulary")
    parser.add_argument("--min-tokens", type=int, default=3)
    parser.add_argument("--max-tokens", type=int, default=8)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    examples = synthetic_separable_dataset(
        n_examples=args.examples,
        n_classes=args.classes,
        vocab_size=args.vocab_size,
        seed=args.seed,
        min_tokens=args.min_tokens,
        max_tokens=args.max_tokens,
    )
    parent = os.path.dirname(args.output)
    if parent:
        os.makedirs(parent, exist_ok=True)
    write_dataset(args.output, examples, n_classes=args.classes)
    print(f"wrote {len(examples)} examples ({args.classes} classes) "
          f"to {args.output}")


if __name__ == "__main__":
    main()
