#!/usr/bin/env python3
# Copyright 2026 The webseq Authors
# SPDX-License-Identifier: Apache-2.0
"""Independent re-count of the character trigram detector.

Counts c1 c2 -> c3 transitions over a word list with "^^word^" padding,
applies add-one smoothing over the 28-symbol alphabet (a-z, other, boundary)
and prints mean per-transition log-probabilities for a fixed set of probes.

    char_markov_oracle.py WORDS            print the table
    char_markov_oracle.py --check WORDS EXPECTED
"""

import math
import sys
from collections import Counter

PROBES = [
    "status", "profile", "dashboard", "settings", "login", "report",
    "q9z3k1x7", "a8f3k2x9q1", "zzxqj", "x7x7x7x7", "0f3a9c2e11b4d5e6",
    "ab", "api", "RANDOM", "user_list",
]
BOUNDARY = "^"
ALPHABET = 28


def symbol(c):
    c = c.lower()
    return c if "a" <= c <= "z" else "#"


def symbols(word):
    return [BOUNDARY, BOUNDARY] + [symbol(c) for c in word] + [BOUNDARY]


def fit(words):
    trigrams = Counter()
    contexts = Counter()
    for w in words:
        s = symbols(w)
        for i in range(2, len(s)):
            trigrams[(s[i - 2], s[i - 1], s[i])] += 1
            contexts[(s[i - 2], s[i - 1])] += 1
    return trigrams, contexts


def score(model, word):
    trigrams, contexts = model
    s = symbols(word)
    total = 0.0
    for i in range(2, len(s)):
        num = trigrams[(s[i - 2], s[i - 1], s[i])] + 1
        den = contexts[(s[i - 2], s[i - 1])] + ALPHABET
        total += math.log(num / den)
    return total / (len(s) - 2)


def table(words_path):
    with open(words_path, encoding="utf-8") as f:
        words = [line.strip() for line in f if line.strip()]
    model = fit(words)
    return [(p, score(model, p)) for p in PROBES]


def main(argv):
    if len(argv) == 2:
        for probe, value in table(argv[1]):
            print(f"{probe}\t{value:.15g}")
        return 0
    if len(argv) == 4 and argv[1] == "--check":
        with open(argv[3], encoding="utf-8") as f:
            frozen = dict(line.rstrip("\n").split("\t") for line in f if line.strip())
        bad = 0
        for probe, value in table(argv[2]):
            want = float(frozen.get(probe, "nan"))
            if not abs(value - want) <= 1e-12:
                print(f"mismatch {probe}: computed {value!r}, frozen {want!r}")
                bad += 1
        print("ok" if bad == 0 else f"{bad} mismatches")
        return 1 if bad else 0
    print(__doc__, file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main(sys.argv))
