"""Generate frozen metric and volume-filter fixtures with reference values.

Reference values come from direct numpy evaluation of the textbook formulas,
independent of the C++ implementation. Run from the repository root.
"""

import json
from pathlib import Path

import numpy as np

OUT = Path("tests/data/metrics")


def sharpe_fixture(rng):
    returns = rng.normal(2e-6, 1e-4, size=1000)
    ipy = 525600.0
    rf_annual = 0.055
    rf = (1.0 + rf_annual) ** (1.0 / ipy) - 1.0
    excess = returns - rf
    sharpe = excess.mean() / excess.std(ddof=1) * np.sqrt(ipy)
    centered = returns - returns.mean()
    m2 = np.mean(centered**2)
    skew = np.mean(centered**3) / m2**1.5
    kurt = np.mean(centered**4) / m2**2
    vol = returns.std(ddof=1) * np.sqrt(ipy) * 100.0
    np.savetxt(OUT / "returns_1000.csv", returns, fmt="%.17g", header="r", comments="")
    return {
        "intervals_per_year": ipy,
        "risk_free_rate": rf_annual,
        "sharpe": sharpe,
        "skew": skew,
        "kurtosis": kurt,
        "volatility_ann": vol,
    }


def volume_fixture(rng):
    n = 100
    vol_a = rng.permutation(np.arange(1, n + 1)) * 0.5
    vol_b = rng.permutation(np.arange(1, n + 1)) * 0.25
    q = 0.25

    def lower_quantile(v):
        s = np.sort(v)
        ecdf = np.arange(1, n + 1) / n
        return s[np.argmax(ecdf >= q)]

    keep = (vol_a >= lower_quantile(vol_a)) & (vol_b >= lower_quantile(vol_b))
    rows = np.column_stack([vol_a, vol_b])
    np.savetxt(OUT / "volumes_100.csv", rows, fmt="%.2f", delimiter=",", header="a,b", comments="")
    return {"quantile": q, "retained": int(keep.sum())}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(20231002)
    expected = {"sharpe_fixture": sharpe_fixture(rng), "volume_fixture": volume_fixture(rng)}
    expected["cagr_31_days"] = (1.0833 ** (365.25 / 31.0) - 1.0) * 100.0
    (OUT / "expected.json").write_text(json.dumps(expected, indent=2) + "\n")
    print(json.dumps(expected, indent=2))


if __name__ == "__main__":
    main()
