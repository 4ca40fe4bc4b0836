"""CSV and summary writers with fixed formatting for regression stability."""

import numpy as np

FLOAT_FMT = "{:.12g}"


def fmt(x):
    x = float(x)
    if x == 0:
        return "0"  # also folds -0.0
    return FLOAT_FMT.format(x)


def write_csv(path, columns, arrays):
    arrays = [np.asarray(a) for a in arrays]
    n = len(arrays[0])
    with open(path, "w", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        for i in range(n):
            fh.write(",".join(fmt(a[i]) for a in arrays) + "\n")


def read_csv(path):
    """Return (columns, 2-D float array)."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return header, data


def write_summary(path, items):
    """``key = value`` lines, one per item, in insertion order."""
    with open(path, "w") as fh:
        for key, value in items.items():
            if isinstance(value, (float, np.floating)):
                value = fmt(value)
            elif isinstance(value, (bool, np.bool_)):
                value = "true" if value else "false"
            fh.write(f"{key} = {value}\n")


def read_summary(path):
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
    return out
