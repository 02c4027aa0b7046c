#!/usr/bin/env python3
"""Convert a LINQS-format citation dataset (<name>.content / <name>.cites)
into the tab-separated files read by `age run`.

Usage: convert_linqs.py <content> <cites> <out_dir> [--test 1000] [--seed 20180101]

Outputs edges.tsv, features.tsv, labels.tsv and splits.tsv in <out_dir>.
Node ids follow the row order of the .content file. Class ids are assigned
by sorting the class names. The splits file marks `test` nodes (a seeded
uniform sample) and `train_pool` for everything else; validation nodes are
drawn per trial by the harness.
"""
import argparse
import random
import sys
from pathlib import Path


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("content")
    ap.add_argument("cites")
    ap.add_argument("out_dir")
    ap.add_argument("--test", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=20180101)
    args = ap.parse_args()

    ids, rows, names = [], [], []
    for line in open(args.content, encoding="utf-8"):
        parts = line.split()
        if not parts:
            continue
        ids.append(parts[0])
        rows.append(parts[1:-1])
        names.append(parts[-1])
    index = {pid: i for i, pid in enumerate(ids)}
    classes = {c: k for k, c in enumerate(sorted(set(names)))}
    n, f = len(ids), len(rows[0])

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    skipped = 0
    with open(out / "edges.tsv", "w") as fh:
        fh.write(f"# converted from {Path(args.cites).name}\n")
        for line in open(args.cites, encoding="utf-8"):
            parts = line.split()
            if len(parts) != 2:
                continue
            if parts[0] not in index or parts[1] not in index:
                skipped += 1
                continue
            fh.write(f"{index[parts[0]]}\t{index[parts[1]]}\n")

    with open(out / "features.tsv", "w") as fh:
        fh.write(f"{n}\t{f}\n")
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                if float(v) != 0.0:
                    fh.write(f"{i}\t{j}\t{v}\n")

    with open(out / "labels.tsv", "w") as fh:
        for i, c in enumerate(names):
            fh.write(f"{i}\t{classes[c]}\n")

    test = set(random.Random(args.seed).sample(range(n), args.test))
    with open(out / "splits.tsv", "w") as fh:
        for i in range(n):
            fh.write(f"{i}\t{'test' if i in test else 'train_pool'}\n")

    print(f"nodes={n} features={f} classes={len(classes)} skipped_edges={skipped}", file=sys.stderr)
    for c, k in sorted(classes.items(), key=lambda kv: kv[1]):
        print(f"  {k}\t{c}", file=sys.stderr)


if __name__ == "__main__":
    main()
