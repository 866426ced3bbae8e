#!/usr/bin/env python3
"""Smoke test for the `lapret` Python extension module.

Usage:
    cargo build -p lapret-py --release
    python3 python/smoke_test.py

Loads the compiled cdylib directly (no install step) and checks a few
known values end to end.
"""

import importlib.util
import math
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load_module():
    candidates = [
        ROOT / "target" / "release" / "liblapret.so",
        ROOT / "target" / "debug" / "liblapret.so",
        ROOT / "target" / "release" / "liblapret.dylib",
        ROOT / "target" / "debug" / "liblapret.dylib",
    ]
    for path in candidates:
        if path.is_file():
            spec = importlib.util.spec_from_file_location("lapret", path)
            module = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(module)
            return module
    sys.exit("liblapret not found; run `cargo build -p lapret-py` first")


def main():
    lapret = load_module()

    # Benchmark surface landmarks and a couple of exact values.
    assert lapret.landmarks(1) == (3, 14)
    assert lapret.landmarks(2) == (3, 9)
    assert lapret.landmarks(3) == (2, 14)
    assert lapret.surface_value(2, 3) == 0.0
    expected = math.sin(2.0 * math.pi / 15.0 * (9.0 - 3.5))
    assert abs(lapret.surface_value(2, 9) - expected) < 1e-12

    # Per-pair estimation on the exact scenario-2 delta series.
    delta = {t: lapret.surface_value(2, t) for t in range(1, 17)}
    assert lapret.estimate_lapret(delta, 9, 10.0, 0.2) == (3, 6)
    assert lapret.estimate_lapret({t: 0.0 for t in range(1, 17)}, 9, 10.0, 0.2) is None

    # A noiseless simulated cell recovers the true gap.
    d_hat, d_floor, n_detected = lapret.simulate_cell(
        2, 0.0, "f1", 10.0, 0.2, n=60, seed=1
    )
    assert (d_hat, d_floor) == (6.0, 6)
    assert n_detected == 30

    # Heuristic ranges on the {1, 2, 3} fixture.
    alpha_min, alpha_max, eps_min, eps_max = lapret.heuristic_ranges(
        [({1: 1.0, 2: 2.0, 3: 3.0}, 3)]
    )
    assert abs(alpha_min - 3.0 / (2.0 + math.sqrt(3.0))) < 1e-9
    assert alpha_min <= alpha_max and eps_min <= eps_max

    # Imputation with eta = 0 is the identity; eta > 0 flips some.
    indicators = [True] * 10 + [False] * 10
    assert lapret.impute(indicators, 0.0, replicates=3, seed=4) == [indicators] * 3
    flipped = lapret.impute(indicators, 0.9, replicates=20, seed=4)
    assert any(rep != indicators for rep in flipped)
    assert all(len(rep) == len(indicators) for rep in flipped)

    print("smoke test passed")


if __name__ == "__main__":
    main()
