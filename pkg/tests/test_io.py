import numpy as np
import pytest
from hypothesis import given

from conftest import H0_NETS, hypergraphs
from hyperpart import FormatError, read_hypergraph, read_partition, write_hmetis, write_partition
from hyperpart.io import format_hmetis, parse_hmetis, parse_partition, parse_rownet_matrix


def nets_of(hg):
    return [hg.pins(e).tolist() for e in range(hg.num_nets)]


def test_parse_h0():
    hg = parse_hmetis("3 4\n1 2\n1 2 3\n3 4\n")
    assert nets_of(hg) == H0_NETS
    assert hg.total_weight == 4.0 and list(hg.a.nweight) == [1.0, 1.0, 1.0]


def test_parse_net_weights():
    hg = parse_hmetis("1 2 1\n7 1 2\n")
    assert nets_of(hg) == [[0, 1]] and hg.net_weight(0) == 7.0


def test_parse_vertex_weights():
    hg = parse_hmetis("2 2 10\n1 2\n1 2\n3\n4\n")
    assert nets_of(hg) == [[0, 1], [0, 1]]
    assert hg.a.vweight.tolist() == [3.0, 4.0]


def test_parse_both_weights_and_comments():
    hg = parse_hmetis("% a comment\n2 3 11\n2 1 2\n% inside\n5 2 3\n1\n1\n9\n")
    assert hg.a.nweight.tolist() == [2.0, 5.0]
    assert hg.a.vweight.tolist() == [1.0, 1.0, 9.0]


@pytest.mark.parametrize(
    "text",
    [
        "",
        "3\n",
        "1 2 7\n1 2\n",
        "x 2\n1 2\n",
        "2 3\n1 2\n",
        "1 3\n1 4\n",
        "1 3\n0 1\n",
        "1 2 1\n0 1 2\n",
        "1 2 10\n1 2\n1\n0\n",
        "1 2\n1 1\n",
        "1 2\n1 2\n1 2\n",
    ],
)
def test_parse_errors(text):
    with pytest.raises(FormatError):
        parse_hmetis(text)


def test_matrix_row_net():
    hg = parse_rownet_matrix("%%MatrixMarket matrix coordinate real general\n2 3 3\n1 1 0.5\n1 2 1\n2 3 -2\n")
    assert nets_of(hg) == [[0, 1], [2]]
    assert hg.num_vertices == 3


def test_matrix_diagonal_has_no_cuttable_nets():
    text = "4 4 4\n" + "".join(f"{i} {i} 1\n" for i in range(1, 5))
    hg = parse_rownet_matrix(text)
    assert hg.num_nets == 4
    assert all(len(hg.pins(e)) == 1 for e in range(4))


def test_matrix_empty_rows_dropped():
    hg = parse_rownet_matrix("3 2 2\n1 1\n3 2\n")
    assert nets_of(hg) == [[0], [1]]


@pytest.mark.parametrize("text", ["2 2 1\n1 3\n", "2 2 2\n1 1\n", "2 2\n", "2 2 1\n1\n", "2 2 2\n1 1\n1 1\n"])
def test_matrix_errors(text):
    with pytest.raises(FormatError):
        parse_rownet_matrix(text)


@given(hypergraphs(min_n=1))
def test_hmetis_round_trip(hg):
    again = parse_hmetis(format_hmetis(hg))
    assert again.snapshot() == hg.snapshot()


def test_files_round_trip(tmp_path, h0):
    path = tmp_path / "h0.hgr"
    write_hmetis(h0, path)
    assert path.read_text() == "3 4\n1 2\n1 2 3\n3 4\n"
    assert read_hypergraph(path).snapshot() == h0.snapshot()
    with pytest.raises(ValueError):
        read_hypergraph(path, "binary")


def test_partition_file(tmp_path):
    path = tmp_path / "h0.part.2"
    write_partition(np.array([0, 0, 1, 1]), path)
    assert path.read_text() == "0\n0\n1\n1\n"
    assert read_partition(path, 4, 2).tolist() == [0, 0, 1, 1]
    with pytest.raises(FormatError, match="incomplete"):
        read_partition(path, 5, 2)
    with pytest.raises(FormatError):
        read_partition(path, 4, 1)
    with pytest.raises(FormatError):
        read_partition(tmp_path / "missing", 4, 2)
    with pytest.raises(FormatError):
        parse_partition("0\nx\n")
