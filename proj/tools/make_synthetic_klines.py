"""Write three days of synthetic 1m klines for a demo pipeline run.

AAA is a random walk, BBB = 1.5 AAA + 20 + OU noise (cointegrated with AAA),
CCC is an independent walk. Usage: make_synthetic_klines.py OUT_DIR [SEED]
"""

import pathlib
import sys

import numpy as np

DAY0_MS = 1_700_006_400_000  # 2023-11-15 00:00 UTC
ROWS = 3 * 1440


def walk(rng, start):
    return np.maximum(20.0, start + np.cumsum(rng.normal(0.0, 0.2, ROWS)))


def write(path, close, rng):
    opens = np.concatenate([[close[0]], close[:-1]])
    volume = rng.uniform(5.0, 50.0, ROWS)
    with open(path, "w") as fh:
        for t in range(ROWS):
            hi = max(opens[t], close[t]) + 0.01
            lo = min(opens[t], close[t]) - 0.01
            fh.write(f"{DAY0_MS + 60_000 * t},{opens[t]:.4f},{hi:.4f},{lo:.4f},{close[t]:.4f},{volume[t]:.3f}\n")


def main():
    out = pathlib.Path(sys.argv[1])
    rng = np.random.default_rng(int(sys.argv[2]) if len(sys.argv) > 2 else 1)
    out.mkdir(parents=True, exist_ok=True)
    a = walk(rng, 200.0)
    ou = np.zeros(ROWS)
    for t in range(1, ROWS):
        ou[t] = 0.9 * ou[t - 1] + rng.normal(0.0, 0.3)
    write(out / "AAA.csv", a, rng)
    write(out / "BBB.csv", 1.5 * a + 20.0 + ou, rng)
    write(out / "CCC.csv", walk(rng, 150.0), rng)


if __name__ == "__main__":
    main()
