#!/usr/bin/env python3
"""Regenerates the shipped fixtures under data/. Output is deterministic."""

import json
import math
import pathlib

import numpy as np

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"

K1 = 0.66e-12
K2 = 0.241e-18
CPP = 1.04e-7
H_CELL = 7.56e-7
D_STEP = 20e-12


def dump(path, obj):
    path.write_text(json.dumps(obj, indent=2) + "\n")


def cell(b):
    levels = 2**b
    full = levels - 1
    inl, sigma = [], []
    for x in range(levels):
        t = x / full
        # bowed transfer curve on w=1, small constant skew on w=0
        bow = 0.11 * math.sin(math.pi * t) * (1.0 if b > 1 else 0.4)
        if b > 1:
            bow *= math.copysign(1.0, 0.5 - t) if t != 0.5 else 0.0
        inl.append([round(0.004 * t, 6), round(bow, 6)])
        s = 0.035 * math.sqrt(1.0 + 0.05 * x)
        sigma.append([round(0.035, 6), round(s, 6)])
    e_op = (0.8 + 0.45 * (b - 1)) * 1e-15
    return {
        "bit_width": b,
        "inl": inl,
        "sigma": sigma,
        "e_op_joules": e_op,
        "e_op_per_r_joules": 0.75 * e_op,
        "d_step_seconds": D_STEP,
        "d_max_seconds": (full + 1) * D_STEP,
        "cpp_meters": CPP,
        "h_cell_meters": H_CELL,
    }


def adc_survey(rng):
    rows = []
    for enob in np.arange(2.0, 17.01, 0.25):
        e = K1 * enob + K2 * 4.0**enob
        rate = 10 ** (9.5 - 0.18 * enob)
        area = 2e-10 * 2 ** (enob / 2)
        rows.append((enob, e, rate, area))
        for _ in range(3):
            rows.append((enob, e * rng.uniform(1.5, 20.0), rate * rng.uniform(0.2, 2.0),
                         area * rng.uniform(0.4, 3.0)))
        # slow designs below the curve; removed by the sample-rate filter
        rows.append((enob, e * rng.uniform(0.2, 0.6), rng.uniform(1e4, 5e5), area * 0.8))
    lines = ["enob,energy_per_conv_joules,sample_rate_hz,area_m2"]
    lines += [f"{r[0]:.2f},{r[1]:.6e},{r[2]:.6e},{r[3]:.6e}" for r in rows]
    return "\n".join(lines) + "\n"


def digital():
    lines = ["n,b,energy_per_mac_joules,area_m2,f_clk_hz"]
    for b in range(1, 5):
        for k in range(4, 13):
            n = 2**k
            energy = (1.5 + 1.2 * b) * (1 + 0.08 * k) * 1e-15
            area = n * (1.2 + 0.9 * b) * 1e-12 * (1 + 0.05 * k)
            lines.append(f"{n},{b},{energy:.6e},{area:.6e},1e9")
    return "\n".join(lines) + "\n"


def main():
    DATA.mkdir(exist_ok=True)
    (DATA / "cells").mkdir(exist_ok=True)
    for b in range(1, 5):
        dump(DATA / "cells" / f"cell_b{b}.json", cell(b))
    dump(DATA / "tdc.json", {
        "e_td_and_joules": 0.5e-15,
        "e_sample_joules": 3e-15,
        "e_cnt_joules": 400e-15,
        "e_cnt_load_joules": 250e-15,
        "t_unit_seconds": D_STEP,
        "a_td_and_m2": 0.3e-12,
        "a_sample_m2": 0.8e-12,
        "a_counter_m2": 12e-12,
    })
    dump(DATA / "analog.json", {
        "e_cap_joules": 0.15e-15,
        "e_logic_joules": 0.0,
        "sigma_cap_rel": 0.02,
        "m_shared": 8,
        "cell_area_m2": 1.0e-12,
    })
    (DATA / "adc_survey.csv").write_text(adc_survey(np.random.default_rng(20)))
    (DATA / "digital.csv").write_text(digital())
    dump(DATA / "default_config.json", {
        "domains": ["td", "analog", "digital"],
        "n_range": "16:4096:log2",
        "b_values": [1, 2, 3, 4],
        "m": 8,
        "mode": "relaxed",
        "sigma_table": {"1": 0.58, "2": 0.98, "3": 1.55, "4": 2.85},
        "clip_bits": 0,
        "weight_density": 0.3,
        "adc_min_rate_hz": 1e6,
        "redundancy_cap": 1024,
        "fixtures": {
            "cells": {str(b): f"cells/cell_b{b}.json" for b in range(1, 5)},
            "tdc": "tdc.json",
            "analog": "analog.json",
            "adc_survey": "adc_survey.csv",
            "digital": "digital.csv",
        },
    })


if __name__ == "__main__":
    main()
