"""Tests for the SVG plot writer."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from kleinsim.exceptions import PlotError
from kleinsim.svg import emit_svg, flag_spans


def test_one_polyline_per_series(tmp_path: Path) -> None:
    x = np.linspace(0.0, 1.0, 5)
    path = tmp_path / "plot.svg"
    emit_svg([(x, x), (x, x**2)], ["a<b", "c"], path, title="T & U", shaded=[(0.2, 0.4)])
    text = path.read_text(encoding="utf-8")
    assert text.startswith("<svg")
    assert text.count("<polyline") == 2
    assert 'fill="#bbbbbb"' in text
    assert "a&lt;b" in text
    assert "T &amp; U" in text


def test_output_is_deterministic(tmp_path: Path) -> None:
    x = np.arange(4.0)
    first, second = tmp_path / "a.svg", tmp_path / "b.svg"
    for path in (first, second):
        emit_svg([(x, np.sin(x))], ["sin"], path)
    assert first.read_bytes() == second.read_bytes()


def test_constant_series_is_drawn(tmp_path: Path) -> None:
    path = tmp_path / "flat.svg"
    emit_svg([([0.0, 1.0], [2.0, 2.0])], ["flat"], path)
    assert "<polyline" in path.read_text(encoding="utf-8")


@pytest.mark.parametrize(
    ("series", "labels"),
    [
        ([], []),
        ([([0.0, 1.0], [0.0, 1.0])], []),
        ([([0.0, 1.0], [0.0])], ["short"]),
        ([([0.0, 1.0], [0.0, np.nan])], ["nan"]),
        ([([0.0, np.inf], [0.0, 1.0])], ["inf"]),
    ],
)
def test_bad_input_rejected(tmp_path: Path, series: list, labels: list[str]) -> None:
    with pytest.raises(PlotError):
        emit_svg(series, labels, tmp_path / "bad.svg")
    assert not (tmp_path / "bad.svg").exists()


def test_flag_spans() -> None:
    spans = flag_spans([0.0, 1.0, 2.0, 3.0, 4.0], [False, True, True, False, True])
    assert spans == [(0.5, 2.5), (3.5, 4.5)]
    assert flag_spans([0.0, 1.0], [False, False]) == []
    with pytest.raises(PlotError):
        flag_spans([0.0, 1.0], [True])
