# Regenerate every committed CSV under data/ by driving the CLI presets.
# Run from the repo root: python3 scripts/make_figure_data.py

import pathlib
import subprocess
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent
DATA = ROOT / "data"

# (output name, CLI arguments); the pure-gate companions overlay the
# preset runs in the final figures, the radial map is the profile panel
JOBS = [
    ("fig1b.csv", ["eta-map", "--preset", "fig1b"]),
    ("fig2c.csv", ["sweep", "--preset", "fig2c"]),
    ("fig3a.csv", ["gate-sim", "--preset", "fig3a"]),
    ("fig3a_pure.csv", ["gate-sim", "--preset", "fig3a",
                        "--tier", "effective_II"]),
    ("fig3b.csv", ["gate-sim", "--preset", "fig3b"]),
    ("fig3b_pure.csv", ["gate-sim", "--preset", "fig3b",
                        "--tier", "effective_II"]),
    ("figB1c.csv", ["eta-map", "--preset", "figB1c"]),
    ("figB1d.csv", ["eta-map", "--series",
                    "breathing_n0,breathing_n1,quad_m0", "--radial",
                    "--diameter-nm", "10"]),
    ("figD1b.csv", ["gate-sim", "--preset", "figD1b"]),
]


def main():
    DATA.mkdir(exist_ok=True)
    for name, args in JOBS:
        out = DATA / name
        cmd = [sys.executable, "-m", "nvphonon.cli"] + args + \
            ["--out", str(out)]
        print(" ".join(cmd[2:]))
        subprocess.run(cmd, check=True)
    print(f"wrote {len(JOBS)} files to {DATA}")


if __name__ == "__main__":
    main()
