#!/usr/bin/env python3
"""Builds the bundled 79-DMA sample inputs (data/dma.csv, data/dma_panel.csv).

The bundle is fully synthetic but shaped like the real panels the
estimator targets: 60 days of outcomes whose cross-DMA median is ~13
with a 95th percentile near 60, a snowfall series that splits DMAs into
treated (a storm day above 1 kg/m²), control (never above 0.3 kg/m²)
and a few intermediate DMAs, and an anticipation bump that starts six
days before each treated DMA's storm so the true causal window is known.

Deterministic: rerunning reproduces the committed files byte for byte.
"""

import csv
import math
import random
from pathlib import Path

SEED = 20240217
N_DMAS = 79
N_TREATED = 40
N_CONTROL = 33  # remaining 6 are intermediate
DAYS = 60
BUMP_AMPLITUDE = 60.0
TRUE_GAP = 6  # storm day minus the last flat day


def bump(day: int, storm_day: int) -> float:
    """Anticipation effect: flat through storm-6, a sharp two-day ramp,
    a plateau through storm+2, then a quick decay back to baseline."""
    offset = day - storm_day
    if offset <= -TRUE_GAP:
        return 0.0
    if offset == -(TRUE_GAP - 1):
        return BUMP_AMPLITUDE / 2.0
    if offset <= 2:
        return BUMP_AMPLITUDE
    return BUMP_AMPLITUDE * 0.5 ** (offset - 2)


def main() -> None:
    rng = random.Random(SEED)
    out_dir = Path(__file__).resolve().parent.parent / "data"
    out_dir.mkdir(exist_ok=True)

    roles = ["treated"] * N_TREATED + ["control"] * N_CONTROL
    roles += ["intermediate"] * (N_DMAS - len(roles))
    rng.shuffle(roles)

    dma_rows = []
    panel_rows = []
    for i, role in enumerate(roles, start=1):
        dma_id = f"dma{i:03d}"
        population = int(round(10 ** rng.uniform(5.2, 6.9)))
        level = min(max(math.exp(rng.gauss(math.log(13.0), 0.93)), 3.0), 90.0)
        income = round(rng.uniform(35.0, 95.0), 1)
        phase = rng.uniform(0.0, 2.0 * math.pi)

        snowfall = [0.0] * (DAYS + 1)
        if role == "treated":
            storm_day = rng.randint(12, 16)
            snowfall[storm_day] = round(rng.uniform(2.0, 8.0), 2)
            if rng.random() < 0.25:
                # A second, weaker eligible day right after the storm.
                snowfall[storm_day + 1] = round(rng.uniform(1.2, 2.0), 2)
            # Light flurries elsewhere, below the control threshold.
            for _ in range(rng.randint(1, 3)):
                d = rng.randint(2, DAYS)
                if snowfall[d] == 0.0:
                    snowfall[d] = round(rng.uniform(0.02, 0.25), 2)
            snow_proneness = round(rng.uniform(0.5, 1.0), 3)
        elif role == "intermediate":
            storm_day = None
            d = rng.randint(20, 48)
            snowfall[d] = round(rng.uniform(0.35, 0.95), 2)
            snow_proneness = round(rng.uniform(0.3, 0.7), 3)
        else:
            storm_day = None
            for _ in range(rng.randint(0, 3)):
                d = rng.randint(2, DAYS)
                snowfall[d] = round(rng.uniform(0.02, 0.25), 2)
            snow_proneness = round(rng.uniform(0.0, 0.5), 3)

        c1 = round(math.log10(population), 4)
        dma_rows.append([dma_id, population, c1, income, snow_proneness])
        for day in range(1, DAYS + 1):
            mu = (
                level
                + 1.5 * math.sin(2.0 * math.pi * day / 7.0)
                + 0.3 * math.sin(2.0 * math.pi * day / 11.0 + phase)
            )
            if storm_day is not None:
                mu += bump(day, storm_day)
            panel_rows.append([dma_id, day, f"{mu:.4f}", f"{snowfall[day]:.2f}"])

    with (out_dir / "dma.csv").open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["dma_id", "population", "c1", "c2", "c3"])
        writer.writerows(dma_rows)
    with (out_dir / "dma_panel.csv").open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["dma_id", "day", "outcome", "snowfall_kg_m2"])
        writer.writerows(panel_rows)
    print(f"wrote {len(dma_rows)} DMAs, {len(panel_rows)} panel rows to {out_dir}")


if __name__ == "__main__":
    main()
