import pytest

from gowers.errors import InvalidParameterError
from gowers.suite import FAULTS, entry_names, verify_suite

MODULES = {
    "group_core", "cube_geometry", "gowers_norms", "spectral_d2", "anti_uniform", "fourier_algebra",
    "decomposable", "regularity", "structured_decomposition", "signals",
}


@pytest.fixture(scope="module")
def quick():
    return verify_suite("quick", seed=11, threads=2)


def test_quick_passes_and_covers_every_module(quick):
    assert quick["ok"], quick["failed"]
    assert {e["module"] for e in quick["entries"]} == MODULES
    assert [e["name"] for e in quick["entries"]] == entry_names()
    assert all(e["checks"] > 0 for e in quick["entries"])


EXPECTED = {
    "dual-function": {"duality_identity", "dual_norm_of_dual_function_d2"},
    "spectrum": {"parseval", "character_certificate", "embedding_bound"},
    "piece": {"structured_verified"},
    "partition": {"own_rectangles_zero", "uniformization"},
}


@pytest.mark.parametrize("fault", FAULTS)
def test_injected_fault_is_reported(fault):
    names = sorted(EXPECTED[fault] | {"holder"})
    report = verify_suite("quick", seed=3, faults=[fault], only=set(names))
    assert set(report["failed"]) == EXPECTED[fault]
    assert report["faults"] == [fault]


def test_thread_count_does_not_change_the_report():
    only = {"method_agreement", "parseval", "dd_product", "own_rectangles_zero"}
    assert verify_suite("quick", 5, 1, only=only) == verify_suite("quick", 5, 4, only=only)


def test_rejects_bad_arguments():
    with pytest.raises(InvalidParameterError):
        verify_suite("medium")
    with pytest.raises(InvalidParameterError):
        verify_suite(faults=["gremlin"])
    with pytest.raises(InvalidParameterError):
        verify_suite(threads=0)
