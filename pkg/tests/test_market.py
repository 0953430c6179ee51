"""CSV ingestion, correlation graph construction, split accounting."""

import math

import numpy as np
import pytest

from quantcut import market as mk
from quantcut import qaoa
from quantcut.errors import (
    ConstantSeries,
    EmptyIntersection,
    MalformedCsv,
    UnknownNode,
    WeightSumInvalid,
)

HEADER = "date,open,high,low,close,volume,Name\n"


def _csv(tmp_path, body, header=HEADER, name="prices.csv"):
    path = tmp_path / name
    path.write_text(header + body)
    return path


def test_ingest_aligns_and_sorts(tmp_path):
    body = (
        "2013-02-08,1,1,1,10.0,100,BBB\n"
        "2013-02-09,1,1,1,11.0,100,BBB\n"
        "2013-02-10,1,1,1,12.0,100,BBB\n"
        "2013-02-09,1,1,1,20.0,100,AAA\n"
        "2013-02-10,1,1,1,21.0,100,AAA\n"
        "2013-02-11,1,1,1,22.0,100,AAA\n"
    )
    res = mk.ingest_csv(_csv(tmp_path, body))
    assert res.tickers == ("AAA", "BBB")
    assert res.dropped_rows == 0
    # intersection of dates, sorted
    assert res.series[0].dates == ("2013-02-09", "2013-02-10")
    np.testing.assert_allclose(res.series[0].values, [20.0, 21.0])
    np.testing.assert_allclose(res.series[1].values, [11.0, 12.0])
    assert res.value_matrix().shape == (2, 2)


def test_ingest_drops_bad_rows(tmp_path):
    body = (
        "2013-02-08,1,1,1,10.0,100,AAA\n"
        "2013-02-09,1,1,1,11.0,100,AAA\n"
        "2013-02-08,1,1,1,,100,AAA\n"  # missing close
        "2013-02-08,1,1,1,nope,100,BBB\n"  # unparsable close
        "2013-02-08,1,1,1,-4.0,100,BBB\n"  # non-positive close
        "2013-02-08,1,1,1,10.0,100,\n"  # missing ticker
        ",1,1,1,10.0,100,BBB\n"  # missing date
        "2013-02-08,1,1,1,5.0,100,BBB\n"
        "2013-02-08,1,1,1,6.0,100,BBB\n"  # duplicate (ticker, date)
        "2013-02-09,1,1,1,5.5,100,BBB\n"
    )
    res = mk.ingest_csv(_csv(tmp_path, body))
    assert res.dropped_rows == 6
    assert res.tickers == ("AAA", "BBB")
    np.testing.assert_allclose(res.series[1].values, [5.0, 5.5])


def test_ingest_header_must_be_superset(tmp_path):
    path = _csv(tmp_path, "x\n", header="date,close,Name\n")
    with pytest.raises(MalformedCsv):
        mk.ingest_csv(path)
    with pytest.raises(MalformedCsv):
        mk.ingest_csv(tmp_path / "missing.csv")
    # extra columns are fine
    body = "2013-02-08,1,1,1,10.0,100,AAA,x\n2013-02-09,1,1,1,11.0,100,AAA,y\n"
    res = mk.ingest_csv(
        _csv(tmp_path, body, header="date,open,high,low,close,volume,Name,extra\n")
    )
    assert res.tickers == ("AAA",)


def test_ingest_requires_shared_dates(tmp_path):
    body = (
        "2013-02-08,1,1,1,10.0,100,AAA\n"
        "2013-02-09,1,1,1,11.0,100,BBB\n"
    )
    with pytest.raises(EmptyIntersection):
        mk.ingest_csv(_csv(tmp_path, body))
    with pytest.raises(EmptyIntersection):
        mk.ingest_csv(_csv(tmp_path, "2013-02-08,1,1,1,,100,AAA\n"))


def test_normalize():
    got = mk.normalize(np.array([3.0, 5.0, 4.0, 7.0]))
    np.testing.assert_allclose(got, [0.0, 0.5, 0.25, 1.0])
    assert got.min() == 0.0 and got.max() == 1.0
    with pytest.raises(ConstantSeries):
        mk.normalize(np.array([2.0, 2.0]))


def test_standardize():
    x = np.array([1.0, 2.0, 3.0, 4.0, 10.0])
    got = mk.standardize(x)
    assert abs(got.mean()) < 1e-12
    assert abs(got.std() - 1.0) < 1e-12  # population moments
    with pytest.raises(ConstantSeries):
        mk.standardize(np.array([1.0, 1.0]))


def test_standardize_absorbs_normalization():
    rng = np.random.default_rng(71)
    x = rng.normal(size=50) * 3 + 7
    np.testing.assert_allclose(
        mk.standardize(mk.normalize(x)), mk.standardize(x), atol=1e-12
    )


def test_pearson_matches_numpy():
    rng = np.random.default_rng(72)
    for _ in range(5):
        x = rng.normal(size=30)
        y = rng.normal(size=30)
        want = float(np.corrcoef(x, y)[0, 1])
        assert mk.pearson(x, y) == pytest.approx(want, abs=1e-12)


def test_pearson_known_values():
    assert mk.pearson([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8, abs=1e-15)
    assert mk.pearson([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0, abs=1e-15)
    assert mk.pearson([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0, abs=1e-15)
    with pytest.raises(ConstantSeries):
        mk.pearson([1, 2, 3], [5, 5, 5])
    with pytest.raises(ValueError):
        mk.pearson([1, 2], [1, 2, 3])
    with pytest.raises(ValueError):
        mk.pearson([1], [2])


def test_covariance_matrix_is_correlation_when_rescaled():
    rng = np.random.default_rng(73)
    x = rng.normal(size=(5, 40)) * rng.uniform(1, 9, size=(5, 1))
    cov = mk.covariance_matrix(x)
    np.testing.assert_allclose(np.diag(cov), np.ones(5), atol=1e-12)
    np.testing.assert_allclose(cov, cov.T, atol=1e-15)
    np.testing.assert_allclose(cov, np.corrcoef(x), atol=1e-10)


def test_covariance_matrix_raw():
    rng = np.random.default_rng(74)
    x = rng.normal(size=(4, 25))
    got = mk.covariance_matrix(x, rescale=False)
    np.testing.assert_allclose(got, np.cov(x, bias=True), atol=1e-12)
    with pytest.raises(ValueError):
        mk.covariance_matrix(np.ones((3, 1)))


def test_build_market_graph_strict_threshold():
    cov = np.array(
        [
            [1.0, 0.2, 0.5],
            [0.2, 1.0, -0.1],
            [0.5, -0.1, 1.0],
        ]
    )
    g = mk.build_market_graph(cov, ("A", "B", "C"), alpha=0.2)
    # the exactly-alpha pair is excluded; only the 0.5 pair survives
    assert g.graph.edges == ((0, 2, 0.5),)
    assert g.tickers == ("A", "B", "C")
    g_low = mk.build_market_graph(cov, ("A", "B", "C"), alpha=0.1)
    assert g_low.graph.n_edges == 2
    # a threshold below a negative covariance would need a negative edge
    with pytest.raises(ValueError):
        mk.build_market_graph(cov, ("A", "B", "C"), alpha=-0.5)
    with pytest.raises(ValueError):
        mk.build_market_graph(cov, ("A", "B"), alpha=0.2)
    with pytest.raises(ValueError):
        mk.build_market_graph(np.ones((2, 3)), ("A", "B"), alpha=0.2)


def test_market_graph_round_trip_and_edge_list():
    g = mk.build_market_graph(
        np.array([[1.0, 0.4], [0.4, 1.0]]), ("X", "Y"), alpha=0.1
    )
    again = mk.MarketGraph.from_dict(g.to_dict())
    assert again == g
    assert g.to_edge_list() == "0 1 0.4\n"
    with pytest.raises(ValueError):
        mk.MarketGraph(qaoa.WeightedGraph(2, ()), ("only-one",), 0.1)


SPLIT_GRAPH = qaoa.WeightedGraph(
    4, ((0, 1, 1.5), (1, 2, 2.5), (2, 3, 3.5), (0, 3, 0.5))
)


def test_acum():
    assert mk.acum(SPLIT_GRAPH, [0, 1]) == 1.5
    assert mk.acum(SPLIT_GRAPH, [0, 1, 2]) == 4.0
    assert mk.acum(SPLIT_GRAPH, [0]) == 0.0
    assert mk.acum(SPLIT_GRAPH, range(4)) == 8.0
    with pytest.raises(UnknownNode):
        mk.acum(SPLIT_GRAPH, [0, 9])


def test_split_metrics_hand_case():
    m = mk.split_metrics(SPLIT_GRAPH, [0, 0, 1, 1])
    assert m.acums == (1.5, 3.5)
    assert m.cut == 3.0
    assert m.total == 8.0
    with pytest.raises(UnknownNode):
        mk.split_metrics(SPLIT_GRAPH, [0, 0, 1])


def test_conservation_residual_is_exactly_zero():
    rng = np.random.default_rng(75)
    for _ in range(20):
        n = int(rng.integers(3, 10))
        g = qaoa.random_graph(n, 0.6, rng=rng, weights="uniform")
        side = rng.integers(0, 2, size=n)
        assert mk.conservation_residual(g, side) == 0.0
    # messy decimal weights stay exact as well
    g = qaoa.WeightedGraph(3, ((0, 1, 0.1), (1, 2, 0.2), (0, 2, 0.3)))
    for s in range(8):
        side = [(s >> q) & 1 for q in range(3)]
        assert mk.conservation_residual(g, side) == 0.0


def test_induced_subgraph():
    sub, mapping = mk.induced_subgraph(SPLIT_GRAPH, [0, 1, 3])
    assert mapping == (0, 1, 3)
    assert sub.n == 3
    assert sub.edges == ((0, 1, 1.5), (0, 2, 0.5))
    with pytest.raises(UnknownNode):
        mk.induced_subgraph(SPLIT_GRAPH, [5])


def _maxcut_solver(sub: qaoa.WeightedGraph):
    bits, _ = qaoa.brute_force_maxcut(sub)
    return tuple(1 if bits[sub.n - 1 - q] == "1" else 0 for q in range(sub.n))


def test_repeated_bisection_tree():
    rng = np.random.default_rng(76)
    g = qaoa.random_graph(8, 0.6, rng=rng, weights="uniform")
    root = mk.repeated_bisection(g, depth=2, solver=_maxcut_solver)
    assert root.nodes == tuple(range(8))
    assert root.children
    # every split conserves its induced subgraph's weight
    stack = [root]
    while stack:
        node = stack.pop()
        if not node.children:
            continue
        total = mk.acum(g, node.nodes)
        assert node.cut + node.acums[0] + node.acums[1] == pytest.approx(
            total, abs=1e-12
        )
        got_nodes = sorted(node.children[0].nodes + node.children[1].nodes)
        assert got_nodes == sorted(node.nodes)
        stack.extend(node.children)
    # leaves partition the node set
    leaves = root.leaves()
    all_nodes = sorted(q for leaf in leaves for q in leaf.nodes)
    assert all_nodes == list(range(8))
    assert 2 <= len(leaves) <= 4


def test_repeated_bisection_stops_on_empty_side():
    g = qaoa.WeightedGraph(3, ())  # edgeless: max cut keeps everyone together
    root = mk.repeated_bisection(g, depth=1, solver=_maxcut_solver)
    assert root.children == ()
    assert root.cut is None


def test_portfolio_metrics():
    mu = [0.1, 0.2, 0.3]
    cov = np.diag([1.0, 2.0, 3.0])
    w = [0.5, 0.25, 0.25]
    assert mk.portfolio_return(w, mu) == pytest.approx(0.175)
    assert mk.portfolio_variance(w, cov) == pytest.approx(
        0.25 * 1 + 0.0625 * 2 + 0.0625 * 3
    )
    with pytest.raises(WeightSumInvalid):
        mk.portfolio_return([0.5, 0.5, 0.5], mu)
    with pytest.raises(WeightSumInvalid):
        mk.portfolio_variance([0.2, 0.2], np.eye(2))


def test_synthetic_prices_deterministic(tmp_path):
    a = mk.synthetic_prices()
    b = mk.synthetic_prices()
    assert a == b
    c = mk.synthetic_prices(seed=8)
    assert a != c
    path = tmp_path / "syn.csv"
    path.write_text(a)
    res = mk.ingest_csv(path)
    assert res.tickers == tuple(f"SYN{i:02d}" for i in range(16))
    assert res.dropped_rows == 0
    assert len(res.series[0].dates) == 180


def test_synthetic_prices_have_group_structure(tmp_path):
    path = tmp_path / "syn.csv"
    path.write_text(mk.synthetic_prices())
    res = mk.ingest_csv(path)
    cov = mk.covariance_matrix(res.value_matrix())
    group = [i * 4 // 16 for i in range(16)]
    intra = [
        cov[i, j]
        for i in range(16)
        for j in range(i + 1, 16)
        if group[i] == group[j]
    ]
    cross = [
        cov[i, j]
        for i in range(16)
        for j in range(i + 1, 16)
        if group[i] != group[j]
    ]
    assert np.mean(intra) > 0.4
    assert np.mean(cross) < 0.3
    assert np.mean(intra) > np.mean(cross) + 0.2
    # thresholding at 0.2 keeps the in-group structure and little else
    g = mk.build_market_graph(cov, res.tickers, alpha=0.2)
    n_intra = sum(1 for i, j, _ in g.graph.edges if group[i] == group[j])
    n_cross = g.graph.n_edges - n_intra
    assert n_intra >= 0.8 * len(intra)
    assert n_cross <= 0.4 * len(cross)
