import xml.etree.ElementTree as ET

import pytest

from shapelab.svg import emit_svg

SERIES = {"F": [(0.1, 0.3), (0.01, 0.1), (0.001, 0.03), (0.0001, 0.01)]}


def test_header_and_parse():
    text = emit_svg(SERIES, {"x": "delta", "y": "F"}, reference_slopes=[0.5], title="threshold")
    assert text.startswith("<svg")
    root = ET.fromstring(text)
    assert root.get("version") == "1.1"
    assert "delta" in text and "threshold" in text
    assert text.count('stroke-dasharray') >= 1


def test_no_labels():
    text = emit_svg(SERIES)
    ET.fromstring(text)
    assert "delta" not in text


def test_deterministic():
    assert emit_svg(SERIES, reference_slopes=[0.5, 1.0]) == emit_svg(SERIES, reference_slopes=[0.5, 1.0])


def test_two_series_legend():
    text = emit_svg({"robin": SERIES["F"], "dirichlet <inf>": [(0.1, 1), (0.01, 2), (0.001, 4), (0.0001, 8)]})
    ET.fromstring(text)  # names are escaped
    assert "robin" in text and "dirichlet &lt;inf&gt;" in text


def test_single_point_series():
    ET.fromstring(emit_svg({"one": [(1.0, 1.0)]}))


@pytest.mark.parametrize("bad", [{}, {"a": []}, {"a": [(1, 0)]}, {"a": [(-1, 1)]}])
def test_rejects(bad):
    with pytest.raises(ValueError):
        emit_svg(bad)
