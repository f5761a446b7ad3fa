#!/usr/bin/env python3
"""Generate the example scenario data under configs/.

Writes two synthetic regions (a 20x20 desk grid and a 53x53 square-mile
grid), a matching scenario config for each, and a short fixed wind series.
Deterministic: rerunning reproduces the same files byte for byte.
"""

import json
import math
import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.normpath(os.path.join(HERE, "..", "configs"))

HEADER = ("row,col,kappa_load,kappa_sav,kappa_depth,kappa_moist,kappa_heat,"
          "kappa_dens,m_tot,m_eff,kappa_elev,lambda,xi,r,c,eta,q_init")


def bump(row, col, crow, ccol, sigma):
    d2 = (row - crow) ** 2 + (col - ccol) ** 2
    return math.exp(-d2 / (2.0 * sigma * sigma))


def make_region(side, value_bumps, hill, seed):
    """Rows of fuel parameters: smooth value/moisture/elevation fields plus
    a little jitter so no two zones are identical."""
    rng = random.Random(seed)
    rows = []
    for row in range(side):
        for col in range(side):
            value = 0.6
            for (cr, cc, sig, amp) in value_bumps:
                value += amp * bump(row, col, cr, cc, sig)
            value += 0.08 * rng.random()
            # Moisture rises gently toward the north-west corner.
            moist = 0.09 + 0.04 * (2.0 * side - row - col) / (2.0 * side)
            moist += 0.004 * (rng.random() - 0.5)
            load = 0.5 + 0.06 * math.sin(0.7 * row) * math.cos(0.5 * col)
            load += 0.02 * (rng.random() - 0.5)
            elev = hill[3] * bump(row, col, hill[0], hill[1], hill[2])
            lam = 0.0034 - 0.006 * moist  # drier fuel burns faster
            rows.append((row, col, round(load, 4), 1500, 0.3, round(moist, 4),
                         18000, 500, 0.05, 0.01, round(elev, 3),
                         round(lam, 6), 0.08, round(value, 4), 1, 100, 5))
    return rows


def save_region(rows, path):
    with open(path, "w") as f:
        f.write(HEADER + "\n")
        for r in rows:
            f.write(",".join(str(v) for v in r) + "\n")


def base_config(region_file, episodes):
    return {
        "region_file": region_file,
        "home_zone": 0,
        "horizon_steps": 12,
        "sigma_obs": 2.0,
        "class_c_area_m2": 40468.564224,
        "base_seed": 1,
        "episodes": episodes,
        "wind_model": {
            "mu_u": 1.1,
            "sigma_u": 0.3,
            "sigma_phi": 0.3,
            "initial_phi": 3.926990816987241,  # from the north-east
        },
        "spread": {
            "ros_scale": 2700.0,
            "wind_coeff": 0.4,
            "wind_exp": 1.4,
            "slope_coeff": 5.0,
            "lb_coeff": 0.3,
            "lb_max": 8.0,
            "edge_noise_sigma": 0.3,
            "step_minutes": 10.0,
            "cutoff_zones": 10.0,
            "p_spot": 0.03,
            "lambda_spot": 0.006666666666666667,
        },
        "kernel": {
            "theta0": 0.0267,
            "theta1": 0.0667,
            "cutoff_zones": 5.0,
        },
        "classifier": {"threshold_l": 15.0},
        "gpc": {
            "theta0_cov": 4.0,
            "theta1_cov": 1.4e-4,
            "theta2_cov": 0.05,
            "active_radius_m": 150.0,
        },
        "fire_init": {
            "min_zones": 4,
            "max_zones": 8,
            "scatter_sigma_m": 70.0,
        },
        "belief_init": {"amplitude": 0.9, "sigma_m": 90.0},
        "policy": {"heli": "cfa-dla", "drone": "ie-dla"},
        "heli_params": {"theta": 5.0},
        "drone_params": {
            "theta_ie": 0.75,
            "theta_ie_stage": [1.0, 0.6, 0.35, 0.2],
            "horizon": 4,
            "num_scenarios": 20,
        },
    }


def desk_config():
    cfg = base_config("desk_region.csv", 200)
    cfg["rho_obs_m"] = 90.0
    cfg["rho_heli_m"] = 90.0
    # 285 m: every greedy lattice return fits the analytic trigger's hop
    # budget on this grid, so the return rule has no quantization shortfall.
    cfg["d_max_m"] = 285.0
    cfg["c_fail"] = 5e4
    cfg["fire_init"]["avoid_home_m"] = 300.0
    return cfg


def fullscale_config():
    cfg = base_config("fullscale_region.csv", 20)
    cfg["rho_obs_m"] = 180.0
    cfg["rho_heli_m"] = 120.0
    cfg["d_max_m"] = 360.0
    cfg["c_fail"] = 5e4
    cfg["fire_init"]["min_zones"] = 6
    cfg["fire_init"]["max_zones"] = 12
    cfg["fire_init"]["avoid_home_m"] = 600.0
    return cfg


def make_wind_series(path, steps, seed):
    rng = random.Random(seed)
    phi = 225.0
    with open(path, "w") as f:
        f.write("timestamp,speed_mps,direction_deg\n")
        for t in range(steps):
            speed = max(0.5, rng.lognormvariate(1.1, 0.3))
            phi = (phi + rng.gauss(0.0, 12.0)) % 360.0
            f.write(f"2025-08-01T{10 + t // 6:02d}:{(t % 6) * 10:02d}:00,"
                    f"{speed:.3f},{phi:.2f}\n")


def main():
    os.makedirs(OUT, exist_ok=True)
    # The valuable zones sit near the home corner: the town the agents defend.
    desk_rows = make_region(
        20, value_bumps=[(3, 6, 2.5, 2.2), (9, 2, 2.2, 1.8)],
        hill=(12, 12, 6.0, 15.0), seed=7)
    save_region(desk_rows, os.path.join(OUT, "desk_region.csv"))

    full_rows = make_region(
        53, value_bumps=[(8, 12, 6.0, 2.4), (20, 5, 5.0, 1.9),
                         (42, 44, 5.0, 1.5)],
        hill=(26, 26, 14.0, 35.0), seed=11)
    save_region(full_rows, os.path.join(OUT, "fullscale_region.csv"))

    for name, cfg in (("desk.json", desk_config()),
                      ("fullscale.json", fullscale_config())):
        with open(os.path.join(OUT, name), "w") as f:
            json.dump(cfg, f, indent=2)
            f.write("\n")

    make_wind_series(os.path.join(OUT, "demo_wind.csv"), 16, seed=3)


if __name__ == "__main__":
    main()
