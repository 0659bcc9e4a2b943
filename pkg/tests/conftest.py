import json
import math
from pathlib import Path

import numpy as np
import pytest

from kerr_spectroscopy.cli import cli_main, load
from kerr_spectroscopy.hamiltonian import SystemParams, coupling_matrix

TWO_PI = 2 * math.pi
J_PAIRS_MHZ = dict(J12=-0.10, J13=-0.42, J14=-0.16, J23=-0.40, J24=-0.40, J34=-0.61)
OMEGA_MHZ = (5000.0, 5013.0, 4983.0, 5030.0)


def mhz(x):
    return TWO_PI * x


def make_params(g, lam, lam2, gamma, J=None, omega=OMEGA_MHZ, **kw):
    """SystemParams from values in ordinary MHz."""
    if J is None:
        J = coupling_matrix(**{k: mhz(v) for k, v in J_PAIRS_MHZ.items()})
    return SystemParams.from_shifted(
        mhz(np.asarray(omega)), J, g=mhz(g), lambda_rabi=mhz(lam), lambda_probe=mhz(lam2), gamma=mhz(gamma), **kw
    )


@pytest.fixture(scope="session")
def fig3_params():
    return make_params(5.0, 1.0, 0.01, 0.25)


@pytest.fixture(scope="session")
def fig4_params():
    return make_params(0.05, 0.090, 0.0075, 0.0060)


class CliRun:
    def __init__(self, out: Path, code: int):
        self.out = out
        self.code = code

    @property
    def manifest(self):
        return json.loads((self.out / "manifest.json").read_text())

    @property
    def peaks(self):
        return json.loads((self.out / "peaks.json").read_text())["peaks"]


def _sweep(name, tmp_path_factory):
    out = tmp_path_factory.mktemp(name)
    code = cli_main(["sweep", name, "--out", str(out)])
    return CliRun(out, code)


@pytest.fixture(scope="session")
def fig3_run(tmp_path_factory):
    """Full-resolution Fig. 3 configuration through the CLI (a few minutes)."""
    return _sweep("fig3", tmp_path_factory)


@pytest.fixture(scope="session")
def fig4_run(tmp_path_factory):
    """Full-resolution Fig. 4 configuration through the CLI (about ten minutes)."""
    return _sweep("fig4", tmp_path_factory)


@pytest.fixture(scope="session")
def fig3_config():
    return load("fig3")
