"""
Batch runs from a JSON configuration
====================================

The ``qslcoupled`` command writes one CSV per run, headed by comment lines
holding the full configuration.  Here the same entry point is called from
Python on a small classical scan and a quantum sweep.
"""

import json
import tempfile
from pathlib import Path

from qslcoupled.cli import main
from qslcoupled.io import read_csv

work = Path(tempfile.mkdtemp())
configs = {
    "classical-scan": {"sweep": {"name": "eps_over_k1", "values": [0.5, 1.5, 3.0, 5.0]}},
    "quantum-sweep": {"n_max": 8, "sweep": {"name": "eps_over_k1", "values": [0.1, 3.0]},
                      "grid": {"x_min": -4, "x_max": 4, "y_min": -4, "y_max": 4,
                               "n_x": 81, "n_y": 81}},
}
for mode, cfg in configs.items():
    path = work / f"{mode}.json"
    path.write_text(json.dumps(cfg))
    out = work / f"{mode}.csv"
    status = main([mode, "--config", str(path), "--out", str(out), "--threads", "1"])
    _, header, rows = read_csv(out.read_text())
    print(f"{mode}: exit {status}")
    print("  " + ",".join(header))
    for row in rows:
        print("  " + ",".join(row))
