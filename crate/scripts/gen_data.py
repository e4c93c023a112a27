#!/usr/bin/env python3
"""Regenerates the bundled experiment traces in crates/core/data.

The traces are synthetic, shaped to the headline numbers of the printed
actuator: peak force, step timing, pressure plateau and repeatability.
Treat every value as +/-5 %.
"""
import math
import pathlib

import numpy as np

OUT = pathlib.Path(__file__).resolve().parent.parent / "crates" / "core" / "data"
NOTE = "# reconstructed trace, values +/-5 %; regenerate with scripts/gen_data.py\n"


def write(name, header, rows, note=NOTE):
    with open(OUT / name, "w", newline="\n") as f:
        f.write(note)
        f.write(",".join(header) + "\n")
        for r in rows:
            f.write(",".join("" if v is None else v for v in r) + "\n")


def fmt(v, d=3):
    s = f"{v:.{d}f}"
    return "0." + "0" * d if s == "-0." + "0" * d else s


def force_trace(rng):
    def pressure(t):
        if t < 1.0:
            return 0.0
        if t < 9.0:
            return -94.0 * (t - 1.0) / 8.0
        if t < 12.0:
            return -94.0
        if t < 15.0:
            return -94.0 * (1.0 - (t - 12.0) / 3.0)
        return 0.0

    rows = []
    # force at 30 Hz, pressure logged separately at 20 Hz
    for i in range(int(16 * 30) + 1):
        t = i / 30.0
        p = pressure(t)
        f = 41.9 * (abs(p) / 94.0) ** 1.3 + rng.normal(0.0, 0.12)
        rows.append((t, None, fmt(max(f, 0.0))))
    for m in range(int(16 * 20)):
        t = m / 20.0 + 0.01
        rows.append((t, fmt(pressure(t) + rng.normal(0.0, 0.25), 2), None))
    rows.sort(key=lambda r: r[0])
    write("force_trace.csv", ["time_s", "pressure_kPa", "force_N"],
          [(fmt(t, 4), p, f) for t, p, f in rows])


def step_response(rng):
    dt = 1.0 / 30.0
    n = int(8.0 / dt) + 1
    t = np.arange(n) * dt
    rise0, rise, hold, fall = 0.5, 2.5, 0.8, 2.5
    d = np.interp(t, [0, rise0, rise0 + rise, rise0 + rise + hold, rise0 + rise + hold + fall, 8.0],
                  [0, 0, 8.0, 8.0, 0, 0])
    d = np.convolve(np.pad(d, 2, mode="edge"), np.ones(5) / 5, mode="valid")
    d = d + rng.normal(0.0, 0.015, n)
    p = np.where((t >= rise0) & (t < rise0 + rise + hold), -50.0, 0.0)
    write("step_response.csv", ["time_s", "pressure_kPa", "displacement_mm"],
          [(fmt(a, 4), fmt(b, 1), fmt(c)) for a, b, c in zip(t, p, d)])


def pressure_sweep(rng):
    d_max, p0, tau, dt = 9.0, 8.436, 0.3, 0.1
    rows, d, t = [], 0.0, 0.0
    for level in range(0, 65, 5):
        target = d_max * (1.0 - math.exp(-level / p0))
        for _ in range(30):
            d += (target - d) * (1.0 - math.exp(-dt / tau))
            rows.append((fmt(t, 2), fmt(-level + rng.normal(0.0, 0.1), 2),
                         fmt(d + rng.normal(0.0, 0.01))))
            t += dt
    write("pressure_sweep.csv", ["time_s", "pressure_kPa", "displacement_mm"], rows)


def trajectories(rng):
    rows = []
    for direction in (1, 2):
        for rnd in range(1, 5):
            scale = 1.0 + rng.normal(0.0, 0.01)
            off = rng.normal(0.0, 0.08, 2)
            for i in range(61):
                s = 0.5 - 0.5 * math.cos(math.pi * i / 60)
                along, across = 12.0 * s * scale, 0.6 * math.sin(math.pi * s)
                x, y = (along, across) if direction == 1 else (across, along)
                x += off[0] + rng.normal(0.0, 0.03)
                y += off[1] + rng.normal(0.0, 0.03)
                rows.append((fmt(i / 30.0, 4), fmt(x), fmt(y), str(direction), str(rnd)))
    write("trajectories.csv", ["time_s", "x_mm", "y_mm", "direction", "round"], rows)


def utm_synthetic():
    mu, alpha = 708211.0002, 2.33765815
    width, thick, gauge, speed = 6.0, 2.0, 25.0, 50.0
    area = width * thick * 1e-6
    rows = []
    for i in range(91):
        elong = 37.5 * i / 90
        lam = 1.0 + elong / gauge
        stress = 2 * mu / alpha * (lam ** (alpha - 1) - lam ** (-alpha / 2 - 1))
        rows.append((fmt(elong / (speed / 60.0), 4), f"{stress * area:.9f}", fmt(elong, 6)))
    write("utm_synthetic.csv", ["time_s", "force_N", "elongation_mm"], rows,
          "# synthetic Type IV export (6 x 2 mm section, 25 mm gauge) from the fitted resin constants\n")


if __name__ == "__main__":
    rng = np.random.default_rng(20211)
    force_trace(rng)
    step_response(rng)
    pressure_sweep(rng)
    trajectories(rng)
    utm_synthetic()
