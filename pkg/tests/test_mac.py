import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopcap import (ChannelSpec, MacSpec, NetworkInstance, place_nodes)
from hopcap.channel import RowFadingField, UnitFadingField
from hopcap.mac import elect_aloha, elect_coloring, elect_csma

NO_FADING = ChannelSpec(fading="none", alpha=4.0, k_threshold=20.0)


def pairwise_distances(net, members):
    pos = net.positions[members]
    diff = pos[:, None, :] - pos[None, :, :]
    return np.hypot(diff[..., 0], diff[..., 1])


def test_mac_spec_validation():
    with pytest.raises(ValueError):
        MacSpec.aloha(1.5)
    with pytest.raises(ValueError):
        MacSpec.coloring(0.0)
    with pytest.raises(ValueError):
        MacSpec.csma(-1.0)
    with pytest.raises(ValueError):
        MacSpec("tdma", 0.5)
    assert MacSpec.aloha(0.3).param_name == "p"
    assert MacSpec.coloring(0.5).param_name == "d"
    assert MacSpec.csma(10.0).param_name == "theta"


def test_aloha_degenerate_probabilities(small_net):
    rng = np.random.default_rng(0)
    assert elect_aloha(small_net, 0.0, rng).size == 0
    assert elect_aloha(small_net, 1.0, rng).size == small_net.n


def test_aloha_binomial_concentration():
    net = place_nodes(10_000, 1.0, seed=77)
    rng = np.random.default_rng(123)
    elected = elect_aloha(net, 0.3, rng)
    expected = 3000
    band = 4 * np.sqrt(10_000 * 0.3 * 0.7)
    assert abs(elected.size - expected) < band


def test_aloha_lag1_autocorrelation(small_net):
    rng = np.random.default_rng(55)
    slots = 10_000
    node = 3
    indicator = np.empty(slots)
    for t in range(slots):
        members = elect_aloha(small_net, 0.4, rng).members
        indicator[t] = node in members
    x = indicator - indicator.mean()
    autocorr = np.dot(x[:-1], x[1:]) / np.dot(x, x)
    assert abs(autocorr) < 3 / np.sqrt(slots)


def test_coloring_huge_d_gives_single_uniform_transmitter(small_net):
    rng = np.random.default_rng(42)
    counts = np.zeros(small_net.n)
    trials = 4000
    for _ in range(trials):
        elected = elect_coloring(small_net, d=10.0, rng=rng)
        assert elected.size == 1
        counts[elected.members[0]] += 1
    # uniform first pick: each node hit with frequency 1/n
    expected = trials / small_net.n
    assert np.all(np.abs(counts - expected) < 5 * np.sqrt(expected))


def test_coloring_collinear_enumeration(collinear_net):
    # nodes at x = 0, 1, 2 with d = 1.5: first pick middle -> {middle};
    # first pick an end -> {both ends}. So P({middle}) = 1/3.
    rng = np.random.default_rng(7)
    trials = 9000
    middle_only = 0
    for _ in range(trials):
        members = set(elect_coloring(collinear_net, 1.5, rng).members.tolist())
        assert members in ({1}, {0, 2})
        middle_only += members == {1}
    freq = middle_only / trials
    sigma = np.sqrt((1 / 3) * (2 / 3) / trials)
    assert abs(freq - 1 / 3) < 3 * sigma


def test_coloring_tiny_d_elects_everyone(small_net):
    rng = np.random.default_rng(1)
    elected = elect_coloring(small_net, d=1e-12, rng=rng)
    assert elected.size == small_net.n


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), d=st.floats(0.05, 1.5))
def test_coloring_hard_core_and_maximality(seed, d):
    net = place_nodes(60, 1.0, seed=seed)
    elected = elect_coloring(net, d, np.random.default_rng(seed + 1))
    members = elected.members
    assert len(set(members.tolist())) == members.size  # no duplicates
    if members.size > 1:
        dm = pairwise_distances(net, members)
        off = dm[~np.eye(members.size, dtype=bool)]
        assert np.all(off >= d)
    outsiders = np.setdiff1d(np.arange(net.n), members)
    for v in outsiders:
        diff = net.positions[members] - net.positions[v]
        assert np.hypot(diff[:, 0], diff[:, 1]).min() < d


def test_csma_collinear_admission_orders(collinear_net):
    # theta = 0.5, no fading, alpha = 4. End node first: middle senses 1 >= theta
    # (removed), far end senses 2^-4 = 0.0625 < theta (admitted).
    # Middle first: both ends sense 1 >= theta -> singleton.
    rng = np.random.default_rng(202)
    seen = set()
    for _ in range(200):
        members = elect_csma(collinear_net, 0.5, NO_FADING, UnitFadingField(), rng)
        member_set = frozenset(members.members.tolist())
        first = members.members[0]
        if first == 1:
            assert member_set == {1}
        else:
            assert member_set == {0, 2}
        seen.add(member_set)
    assert seen == {frozenset({1}), frozenset({0, 2})}


def test_csma_theta_infinity_admits_everyone(small_net):
    rng = np.random.default_rng(3)
    elected = elect_csma(small_net, np.inf, NO_FADING, UnitFadingField(), rng)
    assert elected.size == small_net.n
    elected = elect_csma(small_net, 1e12, NO_FADING, UnitFadingField(), rng)
    assert elected.size == small_net.n


def test_csma_theta_below_diameter_power_gives_singleton(small_net):
    # any second node senses at least (2r)^-alpha from the first transmitter
    r = small_net.disk_radius
    theta = 0.9 * (2 * r) ** (-NO_FADING.alpha)
    rng = np.random.default_rng(4)
    for _ in range(50):
        elected = elect_csma(small_net, theta, NO_FADING, UnitFadingField(), rng)
        assert elected.size == 1


def replay_csma_prefix(net, members, theta, spec, field):
    """Re-sum sensing prefixes; every member must have been below theta on admission."""
    for k in range(1, len(members)):
        candidate = members[k]
        sensed = 0.0
        for prior in members[:k]:
            diff = net.positions[prior] - net.positions[candidate]
            dist = np.hypot(diff[0], diff[1])
            sensed += field.factor(prior, candidate) * dist ** (-spec.alpha)
        assert sensed < theta
    outsiders = np.setdiff1d(np.arange(net.n), members)
    for v in outsiders:
        sensed = 0.0
        for member in members:
            diff = net.positions[member] - net.positions[v]
            dist = np.hypot(diff[0], diff[1])
            sensed += field.factor(member, v) * dist ** (-spec.alpha)
        assert sensed >= theta


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), theta=st.floats(0.05, 50.0))
def test_csma_admission_prefix_property_no_fading(seed, theta):
    net = place_nodes(50, 1.0, seed=seed)
    field = UnitFadingField()
    elected = elect_csma(net, theta, NO_FADING, field, np.random.default_rng(seed))
    replay_csma_prefix(net, elected.members.tolist(), theta, NO_FADING, field)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_csma_admission_prefix_property_rayleigh(seed):
    spec = ChannelSpec(fading="rayleigh", alpha=4.0, k_threshold=20.0)
    net = place_nodes(50, 1.0, seed=seed)
    field = RowFadingField(net.n, np.random.default_rng(seed + 1))
    elected = elect_csma(net, 5.0, spec, field, np.random.default_rng(seed))
    replay_csma_prefix(net, elected.members.tolist(), 5.0, spec, field)


def test_coloring_size_monotone_in_d():
    net = place_nodes(300, 1.0, seed=11)
    for seed in range(10):
        sizes = [
            elect_coloring(net, d, np.random.default_rng(seed)).size
            for d in np.linspace(0.05, 1.2, 12)
        ]
        assert all(a >= b for a, b in zip(sizes, sizes[1:]))


def test_csma_size_monotone_in_theta():
    net = place_nodes(300, 1.0, seed=12)
    for seed in range(10):
        sizes = [
            elect_csma(net, theta, NO_FADING, UnitFadingField(),
                       np.random.default_rng(seed)).size
            for theta in np.geomspace(0.05, 5000, 12)
        ]
        assert all(a <= b for a, b in zip(sizes, sizes[1:]))


def test_elections_are_independent_across_slots(small_net):
    # fresh randomness per call: two consecutive elections differ almost surely
    rng = np.random.default_rng(900)
    sets = {
        frozenset(elect_coloring(small_net, 0.4, rng).members.tolist())
        for _ in range(20)
    }
    assert len(sets) > 1
