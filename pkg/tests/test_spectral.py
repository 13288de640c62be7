"""Local graphs, Laplacians, eigenbases, coarsening and partitioning."""

import numpy as np
import pytest

from srgc.errors import DecompositionError
from srgc.segmentation import SuperRay
from srgc.spectral import (
    CoarseningMap,
    LocalGraph,
    build_local_graph,
    coarsen,
    connected_components,
    eigendecompose,
    graph_structure,
    laplacian,
    partition_super_ray,
    partition_with_tree,
    uncoarsen_signal,
)

from conftest import make_lf


def enumerate_edges_oracle(per_view_pixels, disparity, angular_dims):
    """Oracle: exhaustive neighbor enumeration over all vertex pairs."""
    s_count, t_count = angular_dims
    verts = []
    for v in range(s_count * t_count):
        for y, x in per_view_pixels[v]:
            verts.append((v, int(y), int(x)))
    index = {vtx: i for i, vtx in enumerate(verts)}
    edges = set()
    for (v, y, x), i in index.items():
        for ny, nx in ((y + 1, x), (y - 1, x), (y, x + 1), (y, x - 1)):
            j = index.get((v, ny, nx))
            if j is not None:
                edges.add((min(i, j), max(i, j)))
    for (v, y, x), i in index.items():
        if v != 0:
            continue
        for ov in range(1, s_count * t_count):
            s, tt = divmod(ov, t_count)
            ty = y - round(disparity * s)
            tx = x - round(disparity * tt)
            j = index.get((ov, ty, tx))
            if j is not None:
                edges.add((min(i, j), max(i, j)))
    return edges


def path_graph(n, signal=None):
    edges = np.array([[i, i + 1] for i in range(n - 1)], dtype=np.int64)
    sig = np.zeros(n) if signal is None else np.asarray(signal, dtype=np.float64)
    return LocalGraph(n=n, edges=edges.reshape(-1, 2), signal=sig)


def random_connected_graph(rng, n):
    edges = set()
    for i in range(1, n):
        j = int(rng.integers(0, i))
        edges.add((j, i))
    extra = rng.integers(0, n, size=(n, 2))
    for a, b in extra:
        if a != b:
            edges.add((min(int(a), int(b)), max(int(a), int(b))))
    e = np.array(sorted(edges), dtype=np.int64)
    return LocalGraph(n=n, edges=e, signal=rng.normal(size=n))


class TestLocalGraph:
    def test_two_views_2x2_edge_count(self):
        pix = np.array([[0, 0], [0, 1], [1, 0], [1, 1]], dtype=np.int64)
        sr = SuperRay(label=0, per_view_pixels=[pix, pix], disparity=0.0)
        lf = make_lf([np.zeros((2, 2)), np.zeros((2, 2))], (1, 2))
        g = build_local_graph(sr, lf)
        assert g.n == 8
        assert g.edges.shape[0] == 2 * 4 + 4  # spatial per view + angular

    def test_single_pixel_no_edges(self):
        pix = np.array([[0, 0]], dtype=np.int64)
        sr = SuperRay(label=0, per_view_pixels=[pix], disparity=0.0)
        lf = make_lf([np.zeros((1, 1))], (1, 1))
        g = build_local_graph(sr, lf)
        assert g.n == 1 and g.edges.shape[0] == 0

    def test_strip_matches_enumeration_oracle(self):
        pix = np.array([[0, 0], [0, 1], [0, 2]], dtype=np.int64)
        per_view = [pix, pix, pix]
        sr = SuperRay(label=0, per_view_pixels=per_view, disparity=0.0)
        lf = make_lf([np.zeros((1, 3))] * 3, (1, 3))
        g = build_local_graph(sr, lf)
        assert g.n == 9
        oracle = enumerate_edges_oracle(per_view, 0.0, (1, 3))
        assert len(oracle) == 12  # 3*2 spatial + 3*2 angular
        assert {(int(a), int(b)) for a, b in g.edges} == oracle

    def test_random_shapes_match_oracle(self):
        rng = np.random.default_rng(9)
        for _ in range(5):
            mask = rng.random((5, 5)) < 0.7
            mask[2, 2] = True
            pix = np.argwhere(mask).astype(np.int64)
            per_view = [pix, pix, pix, pix]
            sr = SuperRay(label=0, per_view_pixels=per_view, disparity=1.0)
            g = graph_structure(sr, (2, 2))
            oracle = enumerate_edges_oracle(per_view, 1.0, (2, 2))
            assert {(int(a), int(b)) for a, b in g.edges} == oracle

    def test_signal_is_luma_in_vertex_order(self):
        pix = np.array([[0, 0], [0, 1]], dtype=np.int64)
        sr = SuperRay(label=0, per_view_pixels=[pix, pix], disparity=0.0)
        lf = make_lf(
            [np.array([[10, 20]]), np.array([[30, 40]])], (1, 2)
        )
        g = build_local_graph(sr, lf)
        assert g.signal.tolist() == [10.0, 20.0, 30.0, 40.0]


class TestLaplacian:
    def test_path2(self):
        l = laplacian(path_graph(2)).matrix
        assert np.array_equal(l, np.array([[1.0, -1.0], [-1.0, 1.0]]))

    def test_edgeless(self):
        g = LocalGraph(n=3, edges=np.zeros((0, 2), dtype=np.int64), signal=np.zeros(3))
        assert np.array_equal(laplacian(g).matrix, np.zeros((3, 3)))

    def test_four_cycle(self):
        edges = np.array([[0, 1], [0, 3], [1, 2], [2, 3]], dtype=np.int64)
        g = LocalGraph(n=4, edges=edges, signal=np.zeros(4))
        l = laplacian(g).matrix
        assert np.array_equal(np.diag(l), np.full(4, 2.0))
        assert l.sum(axis=1).tolist() == [0.0] * 4


class TestEigendecompose:
    def test_path2_exact(self):
        basis = eigendecompose(laplacian(path_graph(2)))
        assert basis.eigenvalues == pytest.approx([0.0, 2.0], abs=1e-12)
        r = 1 / np.sqrt(2)
        assert basis.vectors[:, 0] == pytest.approx([r, r])
        assert basis.vectors[:, 1] == pytest.approx([r, -r])

    def test_connected_spectrum(self):
        rng = np.random.default_rng(1)
        g = random_connected_graph(rng, 12)
        basis = eigendecompose(laplacian(g))
        assert abs(basis.eigenvalues[0]) < 1e-9
        assert basis.eigenvalues[1] > 1e-9
        # constant eigenvector for the zero eigenvalue
        assert np.allclose(basis.vectors[:, 0], 1 / np.sqrt(12))

    def test_reconstruction_residual(self):
        rng = np.random.default_rng(2)
        g = random_connected_graph(rng, 12)
        l = laplacian(g).matrix
        basis = eigendecompose(laplacian(g))
        recon = (basis.vectors * basis.eigenvalues) @ basis.vectors.T
        assert np.abs(l - recon).max() <= 1e-8 * max(1.0, np.abs(l).max())

    def test_bit_equal_determinism(self):
        rng = np.random.default_rng(3)
        g = random_connected_graph(rng, 20)
        a = eigendecompose(laplacian(g))
        b = eigendecompose(laplacian(g))
        assert np.array_equal(a.vectors, b.vectors)
        assert np.array_equal(a.eigenvalues, b.eigenvalues)

    def test_zero_multiplicity_matches_flood_fill(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            n = int(rng.integers(4, 32))
            mask = rng.random((n, n)) < 0.08
            edges = sorted(
                (i, j) for i in range(n) for j in range(i + 1, n) if mask[i, j]
            )
            g = LocalGraph(
                n=n,
                edges=np.array(edges, dtype=np.int64).reshape(-1, 2),
                signal=np.zeros(n),
            )
            _, n_comp = connected_components(n, g.edges)
            basis = eigendecompose(laplacian(g))
            assert int((np.abs(basis.eigenvalues) < 1e-7).sum()) == n_comp

    def test_disconnected_zero_basis_is_component_indicators(self):
        # two components {0,1,2} path and {3,4} edge
        edges = np.array([[0, 1], [1, 2], [3, 4]], dtype=np.int64)
        g = LocalGraph(n=5, edges=edges, signal=np.zeros(5))
        basis = eigendecompose(laplacian(g))
        v0, v1 = basis.vectors[:, 0], basis.vectors[:, 1]
        assert v0 == pytest.approx([1 / np.sqrt(3)] * 3 + [0, 0], abs=1e-9)
        assert v1 == pytest.approx([0, 0, 0, 1 / np.sqrt(2), 1 / np.sqrt(2)], abs=1e-9)

    def test_empty_matrix_rejected(self):
        from srgc.spectral import Laplacian

        with pytest.raises(ValueError):
            eigendecompose(Laplacian(matrix=np.zeros((0, 0))))


class TestCoarsen:
    def test_identity_when_target_large(self):
        g = path_graph(4, [1, 2, 3, 4])
        coarse, cmap = coarsen(g, 10)
        assert coarse.n == 4
        assert [m.tolist() for m in cmap.supernodes] == [[0], [1], [2], [3]]

    def test_four_cycle_constant(self):
        edges = np.array([[0, 1], [0, 3], [1, 2], [2, 3]], dtype=np.int64)
        g = LocalGraph(n=4, edges=edges, signal=np.full(4, 7.0))
        coarse, cmap = coarsen(g, 2)
        assert coarse.n == 2
        assert coarse.signal.tolist() == [7.0, 7.0]

    def test_six_path_heavy_edge_matching(self):
        """Frozen expected value from the tie-break rule: greedy index-order
        matching on unit weights pairs (0,1), (2,3), (4,5)."""
        g = path_graph(6, [0, 0, 2, 2, 4, 4])
        coarse, cmap = coarsen(g, 3)
        assert [m.tolist() for m in cmap.supernodes] == [[0, 1], [2, 3], [4, 5]]
        assert coarse.signal.tolist() == [0.0, 2.0, 4.0]
        # chain 0-1-2 on the coarse graph
        assert coarse.edges.tolist() == [[0, 1], [1, 2]]

    def test_exact_target_reached_on_disconnected(self):
        # 3 isolated vertices + an edge: forced smallest-component merges
        edges = np.array([[0, 1]], dtype=np.int64)
        g = LocalGraph(n=5, edges=edges, signal=np.arange(5, dtype=np.float64))
        coarse, cmap = coarsen(g, 2)
        assert coarse.n == 2
        assert sorted(len(m) for m in cmap.supernodes) == [2, 3]

    def test_signal_mass_conserved_for_equal_supernodes(self):
        g = path_graph(6, [1, 3, 5, 7, 9, 11])
        coarse, cmap = coarsen(g, 3)
        sizes = np.array([len(m) for m in cmap.supernodes])
        assert float((coarse.signal * sizes).sum()) == float(g.signal.sum())

    def test_uncoarsen_roundtrips(self):
        g = path_graph(6, [0, 0, 2, 2, 4, 4])
        coarse, cmap = coarsen(g, 3)
        lifted = uncoarsen_signal(coarse.signal, cmap)
        assert lifted.tolist() == [0.0, 0.0, 2.0, 2.0, 4.0, 4.0]

    def test_uncoarsen_identity_map(self):
        cmap = CoarseningMap(
            supernodes=[np.array([i]) for i in range(4)],
            fine_to_coarse=np.arange(4),
        )
        f = np.array([5.0, 1.0, 2.0, 9.0])
        assert np.array_equal(uncoarsen_signal(f, cmap), f)

    def test_uncoarsen_constant_invariance(self):
        g = path_graph(8, np.full(8, 3.0))
        coarse, cmap = coarsen(g, 3)
        assert np.array_equal(uncoarsen_signal(coarse.signal, cmap), g.signal)

    def test_bad_target(self):
        with pytest.raises(ValueError):
            coarsen(path_graph(3), 0)


def _rect_sr(w, h, views=1, disparity=0.0):
    ys, xs = np.mgrid[0:h, 0:w]
    pix = np.column_stack([ys.ravel(), xs.ravel()]).astype(np.int64)
    return SuperRay(label=0, per_view_pixels=[pix] * views, disparity=disparity)


class TestPartition:
    def test_identity_under_bound(self):
        sr = _rect_sr(4, 4)
        res = partition_super_ray(sr, 64, (1, 1))
        assert len(res.parts) == 1 and res.tree == [0] and not res.warned

    def test_8x8_split_in_two(self):
        sr = _rect_sr(8, 8)
        res = partition_super_ray(sr, 32, (1, 1))
        assert len(res.parts) == 2
        assert [p.total_pixels for p in res.parts] == [32, 32]

    def test_16x4_four_parts_simulation(self):
        """Oracle = recursive split simulation: 16x4 under max 16 splits
        into four 4x4 parts."""
        sr = _rect_sr(16, 4)
        res = partition_super_ray(sr, 16, (1, 1))
        assert len(res.parts) == 4
        for p in res.parts:
            pix = p.per_view_pixels[0]
            assert pix.shape[0] == 16
            assert pix[:, 1].max() - pix[:, 1].min() == 3
            assert pix[:, 0].max() - pix[:, 0].min() == 3

    def test_parts_partition_parent(self):
        sr = _rect_sr(9, 7, views=2, disparity=1.0)
        res = partition_super_ray(sr, 40, (1, 2))
        for v in range(2):
            parent = {tuple(p) for p in sr.per_view_pixels[v]}
            got = []
            for part in res.parts:
                got.extend(tuple(p) for p in part.per_view_pixels[v])
            assert len(got) == len(set(got)) == len(parent)
            assert set(got) == parent

    def test_degenerate_returns_unsplit_with_warning(self):
        # single-pixel reference (unsplittable) but a fat second view
        ref = np.array([[0, 0]], dtype=np.int64)
        fat = np.column_stack(
            [np.zeros(8, dtype=np.int64), np.arange(8, dtype=np.int64)]
        )
        sr = SuperRay(label=0, per_view_pixels=[ref, fat], disparity=0.0)
        res = partition_super_ray(sr, 4, (1, 2))
        assert len(res.parts) == 1 and res.warned

    def test_tree_replay_matches(self):
        sr = _rect_sr(12, 10, views=2, disparity=0.5)
        res = partition_super_ray(sr, 30, (1, 2))
        replay = partition_with_tree(sr, res.tree, (1, 2))
        assert len(replay) == len(res.parts)
        for a, b in zip(res.parts, replay):
            for va, vb in zip(a.per_view_pixels, b.per_view_pixels):
                assert np.array_equal(va, vb)

    def test_max_vertices_respected(self):
        sr = _rect_sr(20, 20, views=3)
        res = partition_super_ray(sr, 100, (1, 3))
        assert not res.warned
        for p in res.parts:
            assert p.total_pixels <= 100
