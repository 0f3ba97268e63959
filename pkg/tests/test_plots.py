import os
import subprocess
import sys

import numpy as np
import pytest

from offshore_awe import plots
from offshore_awe.engine import SimConfig, run
from offshore_awe.hydro import frequency_response


@pytest.fixture(scope="module")
def short_record():
    return run(SimConfig(length=800.0, duration=60.0))


def test_scripts_render(tmp_path, short_record, spar_model):
    pytest.importorskip("matplotlib")
    f = np.linspace(0, 1, 50)
    frf = frequency_response(*spar_model, np.geomspace(1e-3, 1, 200))
    summary = [{"length": 600.0, "mode": "baseline", "eta": 0.02},
               {"length": 700.0, "mode": "baseline", "eta": 0.03},
               {"length": 600.0, "mode": "resonance_avoid", "eta": 0.02}]
    files = plots.emit_plots(tmp_path, record=short_record, spectra=(f, {"fy": f ** 2 + 1}),
                             frf=frf, summary=summary, other=short_record)
    scripts = [p for p in files if p.endswith(".py")]
    assert len(scripts) >= 4
    env = dict(os.environ, MPLBACKEND="Agg")
    for s in scripts:
        subprocess.run([sys.executable, s], check=True, env=env, capture_output=True)
        assert os.path.exists(s[:-3] + ".png")


def test_csv_written(tmp_path):
    files = plots.spectrum_plot(tmp_path, "s", [0.0, 0.1], {"a": [1.0, 2.0]})
    data = open(files[1]).read().splitlines()
    assert data[0] == "freq,a" and len(data) == 3
