#!/usr/bin/env python3
"""Emits Fibonacci test cases, one record per line, for `effbench import-cases`."""
import argparse
import json
import random

BOUNDS = {0: (0, 10), 1: (20, 30), 2: (30000, 50000), 3: (250000, 300000)}


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--seed", type=int, required=True)
    parser.add_argument("--level", type=int, default=1)
    parser.add_argument("--count", type=int, default=4)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    low, high = BOUNDS[args.level]
    for _ in range(args.count):
        print(json.dumps({"level": args.level, "input": [rng.randint(low, high)]}))


if __name__ == "__main__":
    main()
