#!/usr/bin/env python3
"""SEP versus correlation coefficient for doubly correlated channels.

8-PSK rate-3/4 code, n_t = n_r = 4, constant transmit/receive correlation,
fixed SNR: one `sweep` CLI run per scatterer count.
"""

import argparse
import os
import tempfile

from dsmimo.cli import main as cli_main

CONFIG_TEMPLATE = """\
scenario.n_t = 4
scenario.n_s = {n_s}
scenario.n_r = 4
corr.tx.model = constant
corr.tx.rho = 0.0
corr.rx.model = constant
corr.rx.rho = 0.0
code = g4
psk.m = 8
snr.start_db = 0
snr.stop_db = 20
snr.step_db = 5
mc.trials = {trials}
mc.seed = {seed}
sweep.axis = rho
sweep.values = {values}
sweep.snr_db = {snr_db}
"""


def run(outdir, ns_list, values, snr_db, trials, seed):
    os.makedirs(outdir, exist_ok=True)
    for n_s in ns_list:
        cfg = CONFIG_TEMPLATE.format(n_s=n_s, trials=trials, seed=seed,
                                     values=values, snr_db=snr_db)
        with tempfile.NamedTemporaryFile("w", suffix=".cfg", delete=False) as f:
            f.write(cfg)
            path = f.name
        out = os.path.join(outdir, f"sep_vs_rho_ns{n_s}.csv")
        rc = cli_main(["sweep", "--config", path, "--out", out])
        os.unlink(path)
        if rc != 0:
            raise SystemExit(rc)


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--outdir", default="results/sep_vs_rho")
    p.add_argument("--ns", default="5,10,20,50,100")
    p.add_argument("--values", default="0.0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")
    p.add_argument("--snr-db", type=float, default=15.0)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=20260808)
    a = p.parse_args()
    run(a.outdir, [int(s) for s in a.ns.split(",")], a.values, a.snr_db,
        a.trials, a.seed)
