"""Smoke tests for the python bindings."""

import math

import pytest

richards = pytest.importorskip("richards")


@pytest.fixture(scope="module")
def example1_soil():
    return richards.VanGenuchtenParams(
        theta_R=0.026, theta_S=0.42, alpha=0.95, n=2.9, K_S=0.12
    )


def test_constitutive_values(example1_soil):
    assert richards.water_content(example1_soil, 0.0) == pytest.approx(0.42)
    assert richards.water_content(example1_soil, -1.0) == pytest.approx(0.2882080, abs=1e-6)
    assert richards.conductivity(example1_soil, -1.0) == pytest.approx(0.0153742, abs=1e-6)
    assert richards.dtheta_dpsi(example1_soil, 0.5) == 0.0

    info = richards.lipschitz_info(example1_soil)
    assert info.L_theta == pytest.approx(0.2341, abs=1e-3)
    assert info.K_globally_lipschitz


def test_constitutive_vectorized(example1_soil):
    import numpy as np

    psi = np.linspace(-5.0, 0.0, 11)
    theta = richards.water_content(example1_soil, psi)
    assert theta.shape == psi.shape
    assert (np.diff(theta) >= -1e-15).all()  # monotone


def test_invalid_parameters_raise():
    with pytest.raises(ValueError):
        richards.VanGenuchtenParams(theta_R=0.5, theta_S=0.4, alpha=1.0, n=2.0, K_S=1.0)


def test_mesh_counts():
    mesh = richards.build_structured(0.0, 1.0, -1.0, 0.0, 10, 10)
    assert mesh.num_nodes == 121
    assert mesh.num_triangles == 200
    assert mesh.num_boundary_edges == 40
    assert mesh.nodes().shape == (121, 2)
    assert mesh.triangles().shape == (200, 3)

    big = richards.build_structured(0.0, 2.0, 0.0, 3.0, 20, 30)
    assert big.num_nodes == 651


def test_theory_helpers():
    rate = richards.theoretical_rate(L=0.25, K_m=1.0, tau=0.1, C_omega=1.0)
    assert rate == pytest.approx(math.sqrt(0.25 / 0.35))
    assert richards.poincare_constant(0.0, 1.0, 0.0, 1.0) == pytest.approx(
        math.sqrt(2.0) / math.pi
    )
    ok, slack = richards.lscheme_condition_constant_k(0.2, 0.2)
    assert ok and slack == pytest.approx(0.1)
    ok, _ = richards.lscheme_condition_constant_k(0.05, 0.2)
    assert not ok


def test_contraction_sweep(tmp_path):
    csv_path = tmp_path / "theory.csv"
    rows = richards.contraction_sweep(str(csv_path))
    assert len(rows) >= 20
    for row in rows:
        assert row["max_measured_ratio"] <= row["theoretical_rate"] + 1e-10
        assert row["condition_slack"] >= 0.0
    header = csv_path.read_text().splitlines()[0]
    assert header == "L,tau,K_m,C_omega,theoretical_rate,max_measured_ratio,condition_slack"


def test_example1_coarse_run(tmp_path):
    report = richards.example1(-2.0, resolutions=[10])
    rows = report.rows()
    assert len(rows) == 6
    assert all(r["converged"] for r in rows)
    assert {r["scheme"] for r in rows} == {
        "L-scheme(0.25)",
        "L-scheme(0.15)",
        "Picard",
        "Newton",
        "Picard/Newton",
        "L-scheme(0.15)/Newton",
    }

    out = tmp_path / "report"
    report.write(str(out))
    csv = (out / "report.csv").read_text().splitlines()
    assert csv[0].startswith("example,soil_or_psivad,scheme,")
    assert len(csv) == 7
    vtks = list((out / "fields").glob("*.vtk"))
    assert len(vtks) == 6
    assert vtks[0].read_text().startswith("# vtk DataFile Version 3.0")
