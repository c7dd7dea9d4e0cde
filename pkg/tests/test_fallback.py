"""The interpreted kernels must produce exactly what the compiled ones do."""

import json
import os
import subprocess
import sys

import pytest

from hyperpart import partition
from hyperpart._jit import DISABLE_ENV, USE_NUMBA
from hyperpart.generators import netlist

SCRIPT = """
import json
from hyperpart import partition
from hyperpart._jit import USE_NUMBA
from hyperpart.generators import netlist
hg = netlist(300, seed=6)
out = {"numba": USE_NUMBA}
for preset in ("strongv", "fastv"):
    res = partition(hg, 3, 0.03, preset, seed=2)
    out[preset] = [res.assignment.tolist(), res.cut, res.stats, res.vcycle_trace]
print(json.dumps(out))
"""


@pytest.mark.skipif(not USE_NUMBA, reason="suite already runs interpreted")
def test_interpreted_kernels_match_compiled():
    env = dict(os.environ, **{DISABLE_ENV: "1"})
    proc = subprocess.run([sys.executable, "-c", SCRIPT], capture_output=True, text=True, env=env, timeout=600)
    assert proc.returncode == 0, proc.stderr
    slow = json.loads(proc.stdout)
    assert slow["numba"] is False
    hg = netlist(300, seed=6)
    for preset in ("strongv", "fastv"):
        res = partition(hg, 3, 0.03, preset, seed=2)
        assert slow[preset] == [res.assignment.tolist(), res.cut, res.stats, res.vcycle_trace]
