import math
import pathlib

import numpy as np
import pytest

ndetect = pytest.importorskip("ndetect")

FIXTURES = pathlib.Path(__file__).resolve().parents[1] / "fixtures"


def test_version():
    assert ndetect.__version__ == "0.1.0"
    assert ndetect.schema_version == 1


def test_is_projector():
    ok, _, _ = ndetect.is_projector(np.diag([1.0, 0.0, 1.0]).astype(complex))
    assert ok
    ok, _, idem = ndetect.is_projector(0.5 * np.eye(2, dtype=complex))
    assert not ok
    assert idem == pytest.approx(0.25 * math.sqrt(2))


def test_tensor_product_matches_numpy():
    rng = np.random.default_rng(1)
    a = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
    b = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
    assert np.allclose(ndetect.tensor_product(a, b), np.kron(a, b))


@pytest.mark.parametrize("name", ["dim4_sym", "dim6", "apparatus", "eraser"])
def test_family_verifies(name):
    f = ndetect.family(name)
    if f["K"] is None:
        pytest.skip("family carries no K")
    r = ndetect.check(f["K"], f["psi"], f["m"], f["ranks"])
    assert r["verdict"]


def test_rank3_fixture():
    r = ndetect.verify_file(str(FIXTURES / "rank3_example.json"))
    assert r["verdict"]
    assert r["C1"][1] == pytest.approx(math.sqrt(0.5), abs=1e-12)
    assert r["warnings"] == []


def test_bad_file_raises():
    with pytest.raises(ndetect.Error):
        ndetect.verify_file(str(FIXTURES.parent / "data" / "truncated.json"))


def test_dim2_infeasible():
    c = ndetect.dim2_infeasibility(200, 5)
    assert c["exact_infeasible"]
    assert c["solutions_found"] == 0
    assert c["best_residual"] > 1e-3


def test_screen_identity():
    f = ndetect.family("dim6", p=0.1, theta=1.0)
    q, cl, cross = ndetect.screen_distributions(f["psi"], f["m"], f["ranks"])
    assert np.allclose(np.array(q), np.array(cl) + np.array(cross), atol=1e-12)
    assert sum(q) == pytest.approx(1.0)


def test_sample_frequencies():
    _, freq, p = ndetect.sample_apparatus(200000, 11, 2)
    assert np.allclose(freq, [1 / 3, 1 / 6, 1 / 6, 1 / 3], atol=0.01)
    assert p > 1e-3
