import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cubeperc import cube, oracle
from cubeperc.cube import make_cube
from cubeperc.errors import FeasibilityError, ValidationError


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_sweeps_have_no_violations(d):
    for report in oracle.verify_all(d):
        assert report.holds, report.violations[:5]
        assert report.subsets_checked > 0


def test_sweep_counts_d4():
    small, big, mindeg = oracle.verify_all(4)
    assert small.subsets_checked == 2**16 - 1
    assert mindeg.subsets_checked == 2**16 - 1
    assert big.subsets_checked == sum(math.comb(16, k) for k in range(1, 9))
    # every subcube is a tight witness of |S| >= 2^delta
    assert mindeg.tight_witnesses == 3**4


def _python_sweep(d):
    """Per-subset recomputation with sets, for comparison with the vectorised sweeps."""
    spec = make_cube(d)
    small_tight = big_tight = mindeg_tight = 0
    for mask in range(1, 1 << spec.n):
        S = set(cube.vertices_from_mask(mask))
        b = cube.boundary_size(S, spec)
        k = len(S)
        bound = max(k * (d - 2 * math.log2(k)), 0.0)
        assert b >= bound - 1e-9
        small_tight += abs(b - bound) <= 1e-9
        if k <= spec.half:
            assert b >= k
            big_tight += b == k
        delta = min(sum((v ^ (1 << i)) in S for i in range(d)) for v in S)
        assert k >= 2**delta
        mindeg_tight += k == 2**delta
    return small_tight, big_tight, mindeg_tight


@pytest.mark.parametrize("d", [1, 2, 3])
def test_vectorised_sweeps_agree_with_python(d):
    small, big, mindeg = oracle.verify_all(d)
    assert (small.tight_witnesses, big.tight_witnesses, mindeg.tight_witnesses) == _python_sweep(d)


def test_singletons_and_whole_cube():
    for d in range(1, 5):
        spec = make_cube(d)
        single = np.array([1 << 5 % spec.n], dtype=np.uint64)
        assert oracle.verify_harper_small(d, single).tight_witnesses == 1
        whole = np.array([(1 << spec.n) - 1], dtype=np.uint64)
        assert oracle.verify_harper_small(d, whole).holds


def test_half_cube_is_tight_for_big_sets():
    for d in range(1, 5):
        spec = make_cube(d)
        half = np.array([cube.mask_from_vertices(cube.subcube({d - 1: 0}, spec))], dtype=np.uint64)
        report = oracle.verify_harper_big(d, half)
        assert report.holds and report.tight_witnesses == 1


def test_sweeps_detect_a_broken_boundary(monkeypatch):
    real = cube.boundary_size_mask
    monkeypatch.setattr(cube, "boundary_size_mask", lambda m, d: real(m, d) - 1)
    assert not oracle.verify_harper_big(3).holds
    assert not oracle.verify_harper_small(3).holds


def test_partitioned_sweep_merges_to_the_same_report():
    whole = [r.to_dict() for r in oracle.verify_all(4)]
    parts = [r.to_dict() for r in oracle.verify_partitioned(4, 7)]
    assert whole == parts


def test_subset_cap():
    with pytest.raises(FeasibilityError):
        oracle.verify_harper_small(5)


def test_degeneracy_examples():
    spec = make_cube(4)
    full = oracle.induced_adjacency(range(spec.n), spec)
    assert oracle.degeneracy_core(full) == set(range(spec.n))
    triangle_plus = {0: {1, 2}, 1: {2}, 3: set()}
    assert oracle.degeneracy_core(triangle_plus) == {0, 1, 2}
    path = {0: {1}, 1: {2}, 2: set()}
    assert oracle.degeneracy_core(path) == {0, 1, 2}
    with pytest.raises(ValidationError):
        oracle.degeneracy_core({0: set(), 1: set()})


@st.composite
def small_graphs(draw):
    n = draw(st.integers(2, 12))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), min_size=1, unique=True))
    adj = {v: set() for v in range(n)}
    for a, b in chosen:
        adj[a].add(b)
        adj[b].add(a)
    return adj


@given(small_graphs())
def test_degeneracy_core_property(adj):
    avg = sum(len(w) for w in adj.values()) / len(adj)
    core = oracle.degeneracy_core(adj)
    assert core
    assert min(len(adj[v] & core) for v in core) >= avg / 2


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 2**16 - 1))
def test_degeneracy_on_cube_subsets(mask):
    spec = make_cube(4)
    S = cube.vertices_from_mask(mask)
    adj = oracle.induced_adjacency(S, spec)
    if cube.induced_edges_mask(mask, 4) == 0:
        return
    core = oracle.degeneracy_core(adj)
    delta = min(len(adj[v] & core) for v in core)
    # the core's min degree bounds |core| >= 2^delta, hence e(S)/|S| <= log2 |S|
    assert len(core) >= 2**delta


def test_bareiss_against_fractions():
    rows = [[2, -1, 0, 3], [-1, 2, -1, 0], [0, -1, 2, 5], [1, 0, 7, 1]]
    assert oracle.bareiss_determinant(rows) == round(np.linalg.det(np.array(rows, dtype=float)))
    assert oracle.bareiss_determinant([[0, 1], [1, 0]]) == -1
    assert oracle.bareiss_determinant([[1, 2], [2, 4]]) == 0
    assert oracle.bareiss_determinant([]) == 1


def test_spanning_trees_of_known_graphs():
    # Q^2 is a 4-cycle (4 trees), Q^3 has 384 and Q^4 has 42467328.
    for d, expected in [(2, 4), (3, 384), (4, 42467328)]:
        spec = make_cube(d)
        assert oracle.spanning_tree_count(list(range(spec.n)), spec) == expected


def brute_connected_sets(spec, root, k):
    out = set()
    for rest in itertools.combinations([v for v in range(spec.n) if v != root], k - 1):
        U = {root, *rest}
        seen, stack = {root}, [root]
        while stack:
            v = stack.pop()
            for i in range(spec.d):
                w = v ^ (1 << i)
                if w in U and w not in seen:
                    seen.add(w)
                    stack.append(w)
        if seen == U:
            out.add(frozenset(U))
    return out


@pytest.mark.parametrize("d,k", [(3, 1), (3, 2), (3, 4), (3, 6), (4, 3), (4, 5), (5, 4)])
def test_connected_set_enumeration_is_exact(d, k):
    spec = make_cube(d)
    listed = [frozenset(U) for U in oracle.connected_sets_containing(spec, 0, k)]
    assert len(listed) == len(set(listed))
    assert set(listed) == brute_connected_sets(spec, 0, k)


def brute_tree_count(spec, root, k):
    """Count (k-1)-edge subsets that form a tree on k vertices including root."""
    if k == 1:
        return 1
    near = [e for e in range(spec.m) if min(cube.hamming_distance(root, x) for x in cube.edge_endpoints(e, spec)) < k - 1]
    count = 0
    for es in itertools.combinations(near, k - 1):
        verts = set()
        for e in es:
            verts.update(cube.edge_endpoints(e, spec))
        if len(verts) != k or root not in verts:
            continue
        # k vertices and k-1 edges: a tree iff connected
        parent = {v: v for v in verts}

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x

        ok = True
        for e in es:
            a, b = (find(x) for x in cube.edge_endpoints(e, spec))
            if a == b:
                ok = False
                break
            parent[a] = b
        count += ok
    return count


@pytest.mark.parametrize("d,k", [(3, 3), (3, 4), (3, 5), (4, 3), (4, 4)])
def test_tree_counts_match_edge_subset_brute_force(d, k):
    spec = make_cube(d)
    assert oracle.count_rooted_trees(spec, 0, k) == brute_tree_count(spec, 0, k)


def test_tree_count_examples():
    for d in range(1, 6):
        spec = make_cube(d)
        assert oracle.count_rooted_trees(spec, 0, 1) == 1
        assert oracle.count_rooted_trees(spec, spec.n - 1, 2) == d
    assert oracle.count_rooted_trees(make_cube(3), 5, 3) == 9 == math.comb(3, 2) + 3 * 2


@pytest.mark.parametrize("d", [2, 3, 4])
def test_tree_counts_root_independent_and_bounded(d):
    spec = make_cube(d)
    for k in range(1, 7):
        counts = {oracle.count_rooted_trees(spec, v, k) for v in range(spec.n)}
        assert len(counts) == 1
        check = oracle.tree_count_check(spec, 0, k)
        assert check.within_e_bound
        assert isinstance(check.within_cayley_bound, bool)


def test_tree_budget():
    with pytest.raises(FeasibilityError):
        oracle.count_rooted_trees(make_cube(7), 0, 3)
    with pytest.raises(FeasibilityError):
        oracle.count_rooted_trees(make_cube(4), 0, 9)


def test_exact_connectivity_examples():
    assert oracle.exact_connectivity_probability(1, Fraction(3, 10)) == Fraction(3, 10)
    assert oracle.exact_connectivity_probability(1, 0.3) == pytest.approx(0.3)
    assert oracle.exact_connectivity_probability(2, Fraction(1, 2)) == Fraction(5, 16)
    assert oracle.exact_connectivity_probability(2, 0.5) == 0.3125
    counts = oracle.connected_spanning_counts(3)
    assert counts[7] == 384
    assert oracle.exact_connectivity_probability(3, Fraction(1, 2)) == Fraction(sum(counts), 4096)
    with pytest.raises(FeasibilityError):
        oracle.exact_connectivity_probability(4, 0.5)


def test_c4_connected_subsets_by_hand():
    # the full 4-cycle plus its four 3-edge paths
    assert oracle.connected_spanning_counts(2) == [0, 0, 0, 4, 1]


def test_exact_connectivity_monotone_in_p():
    values = [oracle.exact_connectivity_probability(3, Fraction(j, 10)) for j in range(11)]
    assert values[0] == 0 and values[-1] == 1
    assert all(a <= b for a, b in zip(values, values[1:]))


def test_exact_hitting_probability():
    assert oracle.exact_hitting_equality_probability(1) == 1
    assert oracle.exact_hitting_equality_probability(2) == Fraction(2, 3)
    dist = oracle.exact_hitting_distribution(2)
    assert sum(dist.values()) == 24
    assert all(tc == 3 for (_, tc) in dist)
    with pytest.raises(FeasibilityError):
        oracle.exact_hitting_equality_probability(3)


def test_sweep_report_serialises():
    report = oracle.verify_harper_big(2)
    data = report.to_dict()
    assert data["holds"] and data["violations"] == [] and data["d"] == 2
