#!/usr/bin/env python3
"""Generate scenarios/paper_scenario.yaml.

Four-way intersection centred at the origin, right-hand traffic, lane
centrelines 2 m either side of the axes. Agent 2 turns left onto Agent 4's
lane through a circular fillet of radius --radius. Region boundaries come
from the central square of half-width --square: each agent's critical region
is the part of its path inside that square.
"""
import argparse
import math

import numpy as np

LANE = 2.0
SPACING = 2.0
BEYOND = 120.0  # path length past the intersection centre


def straight(p0, p1):
    return [("line", np.array(p0, float), np.array(p1, float))]


def sample(segments):
    """Points at uniform arc-length spacing close to SPACING."""
    pieces, total = [], 0.0
    for seg in segments:
        if seg[0] == "line":
            length = float(np.linalg.norm(seg[2] - seg[1]))
        else:
            _, centre, radius, a0, a1 = seg
            length = abs(a1 - a0) * radius
        pieces.append((seg, total, length))
        total += length
    n = max(3, round(total / SPACING))
    pts = []
    for s in np.linspace(0.0, total, n + 1):
        for seg, start, length in pieces:
            if s <= start + length + 1e-9:
                t = (s - start) / length
                if seg[0] == "line":
                    p = seg[1] + t * (seg[2] - seg[1])
                else:
                    _, centre, radius, a0, a1 = seg
                    a = a0 + t * (a1 - a0)
                    p = centre + radius * np.array([math.cos(a), math.sin(a)])
                pts.append(p)
                break
    return np.array(pts)


def paths(radius):
    r = radius
    turn_centre = np.array([LANE - r, -LANE + r])
    return {
        1: straight((-LANE, 82.0), (-LANE, -BEYOND)),
        2: straight((-82.0, -LANE), (LANE - r, -LANE))
        + [("arc", turn_centre, r, -math.pi / 2, 0.0)]
        + straight((LANE, -LANE + r), (LANE, BEYOND)),
        3: straight((69.0, LANE), (-BEYOND, LANE)),
        4: straight((LANE, -39.0), (LANE, BEYOND)),
    }


def dense(pts, step=0.05):
    out, s = [pts[0]], [0.0]
    for a, b in zip(pts[:-1], pts[1:]):
        d = float(np.linalg.norm(b - a))
        k = max(1, int(d / step))
        for i in range(1, k + 1):
            out.append(a + (b - a) * i / k)
            s.append(s[-1] + d / k)
    return np.array(out), np.array(s)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--radius", type=float, default=11.0)
    ap.add_argument("--square", type=float, default=6.0)
    ap.add_argument("--bsr-length", type=float, default=20.0)
    ap.add_argument("--stop-gap", type=float, default=2.0)
    ap.add_argument("--icr-before", type=float, default=50.0)
    ap.add_argument("--icr-after", type=float, default=30.0)
    ap.add_argument("--out", default="scenarios/paper_scenario.yaml")
    args = ap.parse_args()

    wps = {i: sample(segs) for i, segs in paths(args.radius).items()}
    dense_paths = {i: dense(p) for i, p in wps.items()}
    regions = {}
    for i, (own, own_s) in dense_paths.items():
        inside = own_s[np.all(np.abs(own) <= args.square + 1e-9, axis=1)]
        lo, hi = float(inside.min()), float(inside.max())
        regions[i] = dict(
            s_icr_in=lo - args.icr_before,
            s_bs_in=lo - args.bsr_length,
            s_stop=lo - args.stop_gap,
            s_cr_in=lo,
            s_cr_out=hi,
            s_icr_out=hi + args.icr_after,
        )

    v_ref = {1: 14.0, 2: 14.0, 3: 14.0, 4: 8.0}
    priority = {1: 3, 2: 1, 3: 4, 4: 2}
    f = lambda x: f"{round(x, 4):g}"
    lines = [
        "# Generated by tools/gen_paper_scenario.py "
        f"--radius {f(args.radius)} --square {f(args.square)} --stop-gap {f(args.stop_gap)}",
        "name: paper_scenario",
        "sampling_time: 0.1",
        "horizon: 50",
        "penalty: {tolerance: 1.0e-4, initial_weight: 100, escalation: 10, max_outer_iterations: 10}",
        "solver: {tolerance: 1.0e-4, intermediate_tolerance: 1.0e-3, max_iterations: 1000, lbfgs_memory: 10}",
        "lane: {half_lane_width: 1.75, max_heading_offset: 0.7854, search_back: 200}",
        "agents:",
    ]
    for i in (1, 2, 3, 4):
        r = regions[i]
        lines += [
            f"  - id: {i}",
            f"    priority: {priority[i]}",
            f"    v_ref: {f(v_ref[i])}",
            "    drivetrain_time_constant: 0.3",
            f"    initial: {{s: 0, v: {f(v_ref[i])}, a_x: 0}}",
            "    geometry: {length: 5, width: 2}",
            "    limits: {a_x_min: -7, a_x_max: 4, v_max: 15, a_y_max: 3.5, a_tot_max: 7}",
            "    weights: {q: 1, q_n: 1, r: 10}",
            "    safety: {d_xf: 2, d_xr: 2, d_yl: 1, d_yr: 1, t_gap_x: 1, t_gap_y: 1}",
            "    regions: {" + ", ".join(f"{k}: {f(v)}" for k, v in r.items()) + "}",
            "    waypoints:",
        ]
        lines += [f"      - [{f(p[0])}, {f(p[1])}]" for p in wps[i]]
    with open(args.out, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    for i, r in regions.items():
        print(i, {k: round(v, 2) for k, v in r.items()})


if __name__ == "__main__":
    main()
