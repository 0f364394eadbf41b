from pathlib import Path

import pytest

from stochroute.tsplib import TsplibError, parse_tsplib

DATA = Path(__file__).parent.parent / "src" / "stochroute" / "data"

MINIMAL = """NAME: tiny
TYPE: TSP
DIMENSION: 3
EDGE_WEIGHT_TYPE: EUC_2D
NODE_COORD_SECTION
1 0.0 0.0
2 3.0 4.0
3 -1.0 2.5
EOF
"""


def test_minimal_node_coords():
    coords = parse_tsplib(MINIMAL)
    assert coords == [(1, 0.0, 0.0), (2, 3.0, 4.0), (3, -1.0, 2.5)]


def test_bays29_display_data():
    coords = parse_tsplib((DATA / "bays29.tsp").read_text())
    assert len(coords) == 29
    assert coords[0] == (1, 1150.0, 1760.0)


def test_node_coords_win_over_display_data():
    text = MINIMAL.replace("EOF", "DISPLAY_DATA_SECTION\n1 9 9\n2 9 9\n3 9 9\nEOF")
    coords = parse_tsplib(text)
    assert coords[0] == (1, 0.0, 0.0)


def test_dimension_mismatch_names_line():
    text = MINIMAL.replace("DIMENSION: 3", "DIMENSION: 5")
    with pytest.raises(TsplibError, match="DIMENSION is 5 but 3"):
        parse_tsplib(text)


def test_missing_coordinate_sections():
    text = "NAME: x\nDIMENSION: 2\nEDGE_WEIGHT_TYPE: EXPLICIT\nEOF\n"
    with pytest.raises(TsplibError, match="no NODE_COORD_SECTION"):
        parse_tsplib(text)


def test_malformed_header_line_number():
    with pytest.raises(TsplibError, match="line 2"):
        parse_tsplib("NAME: x\ngarbage without colon\nDIMENSION: 1\n")


def test_malformed_coordinate_line():
    bad = MINIMAL.replace("2 3.0 4.0", "2 3.0")
    with pytest.raises(TsplibError, match="line 7"):
        parse_tsplib(bad)


def test_edge_weight_section_is_skipped():
    text = """NAME: w
DIMENSION: 2
EDGE_WEIGHT_TYPE: EXPLICIT
EDGE_WEIGHT_FORMAT: FULL_MATRIX
EDGE_WEIGHT_SECTION
0 5
5 0
DISPLAY_DATA_SECTION
1 1.0 2.0
2 3.0 4.0
EOF
"""
    assert parse_tsplib(text) == [(1, 1.0, 2.0), (2, 3.0, 4.0)]
