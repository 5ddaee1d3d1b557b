import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as scipy_stats

from hopcap import NetworkInstance, distance, place_nodes


def rejection_disk_sample(n, radius, seed):
    """Independent oracle: uniform disk points by rejection from the square."""
    rng = np.random.default_rng(seed)
    points = []
    while len(points) < n:
        xy = rng.uniform(-radius, radius, size=(2 * n, 2))
        inside = xy[np.hypot(xy[:, 0], xy[:, 1]) <= radius]
        points.extend(inside.tolist())
    return np.asarray(points[:n])


def test_two_nodes_inside_unit_disk():
    net = place_nodes(2, 1.0, seed=99)
    assert np.all(np.hypot(net.positions[:, 0], net.positions[:, 1]) <= 1.0 + 1e-12)


def test_mean_squared_radius_matches_rejection_oracle():
    # E[R^2] = radius^2 / 2 for a uniform disk
    net = place_nodes(10_000, 1.0, seed=2024)
    r2 = (net.positions ** 2).sum(axis=1)
    assert r2.mean() == pytest.approx(0.5, abs=0.02)

    oracle = rejection_disk_sample(10_000, 1.0, seed=2024)
    r2_oracle = (oracle ** 2).sum(axis=1)
    assert r2_oracle.mean() == pytest.approx(0.5, abs=0.02)
    assert r2.mean() == pytest.approx(r2_oracle.mean(), abs=0.03)


def test_determinism_same_seed():
    a = place_nodes(5, 1.0, seed=7)
    b = place_nodes(5, 1.0, seed=7)
    assert np.array_equal(a.positions, b.positions)


def test_different_seeds_differ():
    a = place_nodes(5, 1.0, seed=7)
    b = place_nodes(5, 1.0, seed=8)
    assert not np.array_equal(a.positions, b.positions)


@settings(max_examples=25, deadline=None)
@given(n=st.integers(2, 200), radius=st.floats(0.01, 100), seed=st.integers(0, 2**63 - 1))
def test_containment_property(n, radius, seed):
    net = place_nodes(n, radius, seed)
    assert np.all(np.hypot(net.positions[:, 0], net.positions[:, 1])
                  <= radius * (1 + 1e-12))


def test_uniformity_chi2_over_equal_area_annuli():
    net = place_nodes(100_000, 1.0, seed=31337)
    r2 = (net.positions ** 2).sum(axis=1)
    # equal-area annuli in r^2 space; uniform disk gives uniform r^2
    counts, _ = np.histogram(r2, bins=np.linspace(0, 1, 21))
    _, p_value = scipy_stats.chisquare(counts)
    assert p_value > 0.01


def test_angle_uniformity_chi2():
    net = place_nodes(100_000, 1.0, seed=31337)
    angles = np.arctan2(net.positions[:, 1], net.positions[:, 0])
    counts, _ = np.histogram(angles, bins=np.linspace(-np.pi, np.pi, 25))
    _, p_value = scipy_stats.chisquare(counts)
    assert p_value > 0.01


def test_rejects_bad_arguments():
    with pytest.raises(ValueError):
        place_nodes(1, 1.0, seed=0)
    with pytest.raises(ValueError):
        place_nodes(10, 0.0, seed=0)
    with pytest.raises(ValueError):
        place_nodes(10, -2.0, seed=0)


def test_distance_identity_and_pythagoras():
    net = NetworkInstance(
        positions=np.array([[0.0, 0.0], [3.0, 4.0]]), disk_radius=5.0, seed=0
    )
    assert distance(net, 0, 0) == 0.0
    assert distance(net, 0, 1) == 5.0


def test_distance_symmetry(small_net):
    for i in range(small_net.n):
        for j in range(small_net.n):
            assert distance(small_net, i, j) == distance(small_net, j, i)


def test_distance_out_of_range(small_net):
    with pytest.raises(IndexError):
        distance(small_net, 0, small_net.n)
    with pytest.raises(IndexError):
        distance(small_net, -1, 0)


def test_distance_matrix_matches_pairwise(small_net):
    dm = small_net.distance_matrix
    for i in range(0, small_net.n, 5):
        for j in range(0, small_net.n, 3):
            assert dm[i, j] == pytest.approx(distance(small_net, i, j), rel=0, abs=0)


def test_positions_are_immutable(small_net):
    with pytest.raises(ValueError):
        small_net.positions[0, 0] = 42.0


def test_record_round_trip(small_net):
    rec = small_net.to_record()
    back = NetworkInstance.from_record(rec)
    assert np.array_equal(back.positions, small_net.positions)
    assert back.disk_radius == small_net.disk_radius
    assert back.seed == small_net.seed


def test_record_round_trip_through_json(small_net):
    import json

    rec = json.loads(json.dumps(small_net.to_record()))
    back = NetworkInstance.from_record(rec)
    assert np.array_equal(back.positions, small_net.positions)


def test_instance_rejects_outside_positions():
    with pytest.raises(ValueError):
        NetworkInstance(positions=np.array([[0.0, 0.0], [2.0, 0.0]]),
                        disk_radius=1.0, seed=0)


def test_instance_rejects_single_node():
    with pytest.raises(ValueError):
        NetworkInstance(positions=np.array([[0.0, 0.0]]), disk_radius=1.0, seed=0)
