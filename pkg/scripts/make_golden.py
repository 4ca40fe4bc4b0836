"""Regenerate the reference datasets under tests/golden/ from the CLI presets.

Run after an intentional change to the numerics, then review the diff.
"""

from pathlib import Path
import shutil
import sys

from darkstate.cli import main

GOLDEN = Path(__file__).resolve().parents[1] / "tests" / "golden"

# (directory, cli arguments)
CASES = [
    ("fig3", ["fig3", "--preset", "fig3"]),
    ("fig4", ["load", "--preset", "fig4"]),
    ("fig4-gaussian", ["load", "--preset", "fig4-gaussian"]),
    ("fig4-hyper", ["load", "--preset", "fig4-hyper"]),
    ("fig5", ["cycle", "--preset", "fig5"]),
]


def regenerate(root=GOLDEN):
    for name, args in CASES:
        out = root / name
        if out.exists():
            shutil.rmtree(out)
        code = main([*args, "--out", str(out)])
        if code != 0:
            sys.exit(f"{name}: exit code {code}")
        print(f"wrote {out}")


if __name__ == "__main__":
    regenerate()
