import numpy as np
import pytest

from fastmice.dataset import MultiViewDataset, ViewMatrix
from fastmice.rng import SeedStream, derive
from fastmice.viewgroups import (
    ViewGroup,
    ViewGroupConfig,
    ViewMember,
    generate_view_groups,
    member_matrix,
    sampled_dim,
)


def dataset(dims, n=6, seed=0):
    gen = np.random.default_rng(seed)
    return MultiViewDataset(tuple(ViewMatrix(gen.normal(size=(n, d))) for d in dims))


def test_defaults():
    cfg = ViewGroupConfig()
    assert (cfg.m_groups, cfg.v_min, cfg.tau_min, cfg.tau_max) == (20, 1, 0.2, 0.8)
    assert cfg.resolved_v_max(4) == 4


def test_early_fusion_special_case():
    ds = dataset([4, 5, 6])
    groups = generate_view_groups(ds, ViewGroupConfig(m_groups=1, v_min=3, v_max=3), SeedStream(0))
    assert len(groups) == 1
    assert groups[0].view_indices == [0, 1, 2]


def test_late_fusion_special_case():
    ds = dataset([4, 5, 6])
    groups = generate_view_groups(ds, ViewGroupConfig(m_groups=3, v_min=1, v_max=1), SeedStream(0))
    assert len(groups) == 3
    assert all(g.size == 1 for g in groups)


@pytest.mark.parametrize("tau,dim,expected", [(0.25, 10, 3), (0.2, 10, 2), (0.3, 10, 3),
                                              (0.01, 10, 1), (1.0, 7, 7)])
def test_sampled_dim(tau, dim, expected):
    assert sampled_dim(tau, dim) == expected


def test_v_max_too_large():
    with pytest.raises(ValueError):
        generate_view_groups(dataset([3, 3]), ViewGroupConfig(v_max=3), SeedStream(0))


def test_invalid_tau():
    with pytest.raises(ValueError):
        ViewGroupConfig(tau_min=0.0)
    with pytest.raises(ValueError):
        ViewGroupConfig(tau_min=0.9, tau_max=0.5)


def test_group_invariants_and_coverage():
    ds = dataset([10, 3, 25, 1], n=3)
    cfg = ViewGroupConfig(m_groups=1000)
    groups = generate_view_groups(ds, cfg, SeedStream(11))
    assert len(groups) == 1000
    assert {g.size for g in groups} == {1, 2, 3, 4}
    for g in groups:
        views = g.view_indices
        assert len(set(views)) == len(views)
        for m in g.members:
            d = ds.dims[m.view_index]
            assert 0.2 <= m.tau <= 0.8
            assert m.dim == sampled_dim(m.tau, d) >= 1
            assert np.unique(m.features).size == m.dim
            assert np.all(np.diff(m.features) > 0)
            assert m.features.min() >= 0 and m.features.max() < d


def test_groups_use_only_their_own_stream():
    ds = dataset([8, 8, 8])
    s = SeedStream(3)
    groups = generate_view_groups(ds, ViewGroupConfig(m_groups=5), s)
    alone = generate_view_groups(ds, ViewGroupConfig(m_groups=9), s)
    for a, b in zip(groups, alone):
        assert a.view_indices == b.view_indices
        for ma, mb in zip(a.members, b.members):
            np.testing.assert_array_equal(ma.features, mb.features)


def test_member_matrix_slicing():
    x = np.arange(12, dtype=float).reshape(4, 3)
    ds = MultiViewDataset((ViewMatrix(x),))
    g = ViewGroup(0, (ViewMember(0, 0.5, np.array([2, 0])),))
    out = member_matrix(ds, g, 0)
    np.testing.assert_array_equal(out, x[:, [2, 0]])
    np.testing.assert_array_equal(member_matrix(ds, g, 0), out)
    full = ViewGroup(0, (ViewMember(0, 1.0, np.arange(3)),))
    np.testing.assert_array_equal(member_matrix(ds, full, 0), x)
    with pytest.raises(IndexError):
        member_matrix(ds, g, 1)
