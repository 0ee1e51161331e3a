#!/usr/bin/env python3
"""Generate the bundled WLTC-class-3-structured drive cycle.

Deterministic (no RNG). Phase durations and peak speeds follow the class 3b
structure: Low 589 s / 56.5 km/h, Medium 433 s / 76.6 km/h, High 455 s /
97.4 km/h, Extra-High 323 s / 131.3 km/h; 1 Hz sampling, 1801 samples.
The point values are NOT the official UNECE GTR 15 table.
"""

import math

def ramp(v0, v1, T):
    return lambda tau: v0 + (v1 - v0) * (1 - math.cos(math.pi * min(tau / T, 1.0))) / 2

def cruise(v, amp=0.0, period=25.0):
    return lambda tau: max(0.0, v + amp * math.sin(2 * math.pi * tau / period))

def idle():
    return lambda tau: 0.0

# (duration s, profile); the last segment of each phase is stretched so the
# phase duration comes out exact.
PHASES = [
    (589, [
        (11, idle()),
        (20, ramp(0, 45, 20)), (40, cruise(45, 1.8)), (10, ramp(45, 25, 10)),
        (20, cruise(25, 1.0)), (12, ramp(25, 0, 12)), (15, idle()),
        (22, ramp(0, 56.5, 22)), (45, cruise(56.5, 0.0)), (12, ramp(56.5, 35, 12)),
        (25, cruise(35, 1.2)), (15, ramp(35, 0, 15)), (18, idle()),
        (18, ramp(0, 50, 18)), (50, cruise(50, 1.6)), (14, ramp(50, 20, 14)),
        (15, cruise(20, 0.8)), (10, ramp(20, 0, 10)), (12, idle()),
        (14, ramp(0, 38, 14)), (60, cruise(38, 1.5)), (16, ramp(38, 0, 16)),
        (12, idle()),
        (12, ramp(0, 30, 12)), (50, cruise(30, 1.2)), (12, ramp(30, 0, 12)),
        (29, idle()),
    ]),
    (433, [
        (10, idle()),
        (20, ramp(0, 60, 20)), (90, cruise(60, 1.8, 30)), (15, ramp(60, 76.6, 15)),
        (55, cruise(76.6, 0.0)), (15, ramp(76.6, 50, 15)), (80, cruise(50, 1.6, 35)),
        (10, ramp(50, 35, 10)), (50, cruise(35, 1.2)), (16, ramp(35, 0, 16)),
        (72, idle()),
    ]),
    (455, [
        (8, idle()),
        (22, ramp(0, 70, 22)), (90, cruise(70, 1.8, 40)), (20, ramp(70, 97.4, 20)),
        (75, cruise(97.4, 0.0)), (12, ramp(97.4, 80, 12)), (100, cruise(80, 1.6, 45)),
        (12, ramp(80, 60, 12)), (60, cruise(60, 1.4, 30)), (22, ramp(60, 0, 22)),
        (34, idle()),
    ]),
    (323, [
        (30, ramp(0, 90, 30)), (40, cruise(90, 1.6, 35)), (18, ramp(90, 110, 18)),
        (40, cruise(110, 1.4, 40)), (25, ramp(110, 131.3, 25)), (42, cruise(131.3, 0.0)),
        (18, ramp(131.3, 100, 18)), (30, cruise(100, 1.2, 30)), (35, ramp(100, 0, 35)),
        (45, idle()),
    ]),
]

def build():
    speed = []
    for duration, segments in PHASES:
        nominal = sum(d for d, _ in segments)
        # stretch the final segment to make the phase duration exact
        segs = list(segments)
        d_last, f_last = segs[-1]
        segs[-1] = (d_last + duration - nominal, f_last)
        t_local = 0.0
        for d, f in segs:
            for k in range(int(d)):
                speed.append(max(0.0, f(float(k))))
            t_local += d
        assert sum(d for d, _ in segs) == duration
    speed.append(0.0)  # closing sample at t = 1800
    assert len(speed) == 1801, len(speed)
    return speed

def main():
    speed = build()
    peak = max(speed)
    assert abs(peak - 131.3) < 0.2, peak
    with open("wltc_class3.csv", "w", newline="\n") as f:
        f.write("# Synthetic drive cycle with the WLTC class 3b phase structure\n")
        f.write("# (Low/Medium/High/Extra-High = 589/433/455/323 s, phase peaks\n")
        f.write("# 56.5/76.6/97.4/131.3 km/h, 1 Hz, 1801 samples, 1800 s total).\n")
        f.write("# NOT the official UNECE GTR 15 point table; generated by\n")
        f.write("# make_wltc_like.py as a structure-matched stand-in.\n")
        f.write("t_s,v_kmh\n")
        for i, v in enumerate(speed):
            f.write(f"{i},{v:.1f}\n")
    print(f"wrote wltc_class3.csv: {len(speed)} samples, peak {peak:.1f} km/h")

if __name__ == "__main__":
    main()
