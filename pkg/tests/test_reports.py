"""
Author: Louis Goodnews
Date: 2025-09-13
"""

import json

from pathlib import Path

import pytest

from crmcred.core.exceptions import ReportError
from crmcred.core.reports import CrmReportService, render_csv, render_json


def test_render_csv_keeps_floats_exact() -> None:
    text = render_csv(rows=[["beta0", "hmse1", "crossover"], [-0.05, 0.1 + 0.2, None], [0.0, 1e-300, 3]])

    assert text == "beta0,hmse1,crossover\n-0.05,0.30000000000000004,\n0.0,1e-300,3\n"
    assert float(text.splitlines()[1].split(",")[1]) == 0.1 + 0.2


def test_render_csv_quotes_cells_with_commas() -> None:
    assert render_csv(rows=[["constraint"], ["a,b"]]) == 'constraint\n"a,b"\n'


def test_render_json_is_deterministic() -> None:
    text = render_json(value={"z": 1, "a": [1.5, None]})

    assert text == '{\n  "a": [\n    1.5,\n    null\n  ],\n  "z": 1\n}\n'
    assert render_json(value={"a": [1.5, None], "z": 1}) == text


def test_service_is_a_singleton() -> None:
    assert CrmReportService() is CrmReportService()


def test_publish_creates_missing_directories(tmp_path: Path) -> None:
    path = tmp_path / "out" / "nested" / "hmse.csv"

    written = CrmReportService().publish_csv(path=path, rows=[["t"], [1]])

    assert written == path
    assert path.read_bytes() == b"t\n1\n"


def test_publish_json(tmp_path: Path) -> None:
    path = CrmReportService().publish_json(path=tmp_path / "hmse.json", value={"rows": []})

    assert json.loads(path.read_text(encoding="utf-8")) == {"rows": []}


def test_publish_reports_an_unusable_directory(tmp_path: Path) -> None:
    blocker = tmp_path / "file"
    blocker.write_text("x", encoding="utf-8")

    with pytest.raises(ReportError, match="cannot create directory"):
        CrmReportService().publish(content="x", path=blocker / "hmse.csv")


def test_publish_reports_a_failed_write(tmp_path: Path, mocker) -> None:
    async def refuse(**kwargs: object) -> bool:
        return False

    mocker.patch("crmcred.core.reports.write_file_atomically", new=refuse)

    with pytest.raises(ReportError, match="cannot write"):
        CrmReportService().publish(content="x", path=tmp_path / "hmse.csv")

    assert not (tmp_path / "hmse.csv").exists()
