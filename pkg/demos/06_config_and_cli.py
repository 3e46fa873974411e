"""
Driving a sweep from a JSON config
==================================

The same run the command line performs with
``exchange-lab simulate --config run.json --out run.csv``.
"""

# %%
import json
import tempfile
from pathlib import Path

from exchange_lab.cli import main

config = {
    "model": "electron-phonon-q0",
    "params": {"nu": 2, "eps": [0.5, 1.2], "omega0": 1.0, "v0": 0.5, "n_max": 10},
    "state": {"c": [0, 0.6, 0.8, 0], "d": {"basis_index": 0}},
    "grid": {"t_max": 12.0, "steps": 7},
    "numerics": {"method": "both", "reference_eta": 0.5},
}

with tempfile.TemporaryDirectory() as tmp:
    cfg = Path(tmp) / "run.json"
    out = Path(tmp) / "run.csv"
    cfg.write_text(json.dumps(config))
    print("exit status:", main(["simulate", "--config", str(cfg), "--out", str(out)]))
    print(out.read_text())
