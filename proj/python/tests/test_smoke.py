import math
import os
import pathlib

import numpy as np
import pytest

import minidx

CONFIGS = pathlib.Path(os.environ.get("MINIDX_CONFIGS", pathlib.Path(__file__).parents[2] / "configs"))


@pytest.fixture(scope="module")
def torus():
    return minidx.hypersurface(minidx.ambient("sphere(3)"), "clifford-torus", resolution=[32, 32])


def test_ambient_identities():
    cp2 = minidx.ambient("cp(2)")
    assert cp2.dim == 4 and cp2.embed_dim == 9
    assert cp2.einstein_constant == pytest.approx(6.0)
    report = cp2.verify_identities(samples=100)
    assert report["max_residual"] < 1e-8


def test_torus_spectrum(torus):
    assert torus.volume == pytest.approx(2 * math.pi**2)
    spec = minidx.spectrum(torus)
    assert spec["index"] == 5
    np.testing.assert_allclose(spec["eigenvalues"][:5], [-4, -2, -2, -2, -2], atol=1e-8)


def test_harmonic_forms_and_identity(torus):
    forms = minidx.harmonic_forms(torus)
    assert forms["kernel_dimension"] == 2
    report = minidx.q_identity(torus, forms["basis"][0], "wedge")
    assert report["residual"] < 1e-6
    assert report["rhs"] / report["mass"] == pytest.approx(-2.0, abs=1e-6)


def test_certificate_and_bound(torus):
    cert = minidx.certificate(torus, eta=0.0)
    assert cert["verdict"] == "pass" and cert["required"] == 1 and cert["actual"] == 5
    bound = minidx.index_bound(torus)
    assert bound["bound"] == 5 and bound["tight"]


def test_constants_and_margins():
    assert minidx.theorem_constant(minidx.ambient("cp(2)")) == (1, 36, 9)
    assert minidx.geodesic_sphere_minimal_radius(2) == pytest.approx(math.pi / 3, abs=1e-10)
    assert minidx.product_q_margin(grid=401, samples=100)["min"] == pytest.approx(0.875, abs=1e-4)
    assert minidx.cross_margin(minidx.ambient("hp(2)"), samples=50)["pass"]


def test_errors():
    with pytest.raises(Exception):
        minidx.ambient("torus(2)")
    with pytest.raises(ValueError):
        minidx.run_config(str(CONFIGS / "malformed.cfg"))


def test_run_config(tmp_path):
    code, log = minidx.run_config(str(CONFIGS / "clifford.cfg"), str(tmp_path), resolution_scale=0.5)
    assert code == 0, log
    assert (tmp_path / "clifford.json").exists()
    assert (tmp_path / "summary.csv").read_text().startswith("scenario,task,verdict,detail")
