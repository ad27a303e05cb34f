#!/usr/bin/env python3
"""MISO transmit-diversity study: SEP versus number of effective scatterers.

8-PSK rate-3/4 code on four transmit antennas, single receive antenna,
constant correlation with the same coefficient on the transmit and
scatterer sides; one `sweep` CLI run per coefficient.
"""

import argparse
import os
import tempfile

from dsmimo.cli import main as cli_main

CONFIG_TEMPLATE = """\
scenario.n_t = 4
scenario.n_s = 4
scenario.n_r = 1
corr.tx.model = constant
corr.tx.rho = {rho}
corr.sc.model = constant
corr.sc.rho = {rho}
code = g4
psk.m = 8
snr.start_db = 0
snr.stop_db = 30
snr.step_db = 5
mc.trials = {trials}
mc.seed = {seed}
sweep.axis = ns
sweep.values = {values}
sweep.snr_db = {snr_db}
"""


def run(outdir, rho_list, values, snr_db, trials, seed):
    os.makedirs(outdir, exist_ok=True)
    for rho in rho_list:
        cfg = CONFIG_TEMPLATE.format(rho=rho, trials=trials, seed=seed,
                                     values=values, snr_db=snr_db)
        with tempfile.NamedTemporaryFile("w", suffix=".cfg", delete=False) as f:
            f.write(cfg)
            path = f.name
        out = os.path.join(outdir, f"sep_vs_ns_rho{rho:g}.csv")
        rc = cli_main(["sweep", "--config", path, "--out", out])
        os.unlink(path)
        if rc != 0:
            raise SystemExit(rc)


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--outdir", default="results/miso_vs_ns")
    p.add_argument("--rho", default="0.0,0.3,0.6,0.9")
    p.add_argument("--values", default="1,2,3,4,6,8,12,16,24,32,48,64")
    p.add_argument("--snr-db", type=float, default=25.0)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=20260808)
    a = p.parse_args()
    run(a.outdir, [float(s) for s in a.rho.split(",")], a.values, a.snr_db,
        a.trials, a.seed)
