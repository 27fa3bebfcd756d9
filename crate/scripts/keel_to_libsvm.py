#!/usr/bin/env python3
"""Convert KEEL-format .dat copies of heart/australian/pima to LIBSVM text.

Usage: keel_to_libsvm.py KEEL_RAW_DIR OUT_DIR

Label tokens follow the LIBSVM site's conventions for the same datasets.
"""
import csv
import os
import sys

DATASETS = {
    # name: (keel file, {keel class: libsvm label})
    "heart": ("heart.dat", {"2": "+1", "1": "-1"}),
    "australian": ("australian.dat", {"1": "+1", "0": "-1"}),
    "diabetes": ("pima.dat", {"tested_negative": "+1", "tested_positive": "-1"}),
}


def fmt(value):
    v = float(value)
    return repr(int(v)) if v == int(v) else repr(v)


def main(src, dst):
    for name, (fname, labels) in DATASETS.items():
        with open(os.path.join(src, fname)) as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].startswith("@")]
        with open(os.path.join(dst, name + ".libsvm"), "w") as out:
            for row in rows:
                *feats, cls = [c.strip() for c in row]
                pairs = [f"{i}:{fmt(v)}" for i, v in enumerate(feats, 1) if float(v) != 0.0]
                out.write(" ".join([labels[cls]] + pairs) + "\n")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
