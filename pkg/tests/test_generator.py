import json

import pytest

from src import __version__
from src.generator.artifact_writer import ArtifactWriter, RunManifest, format_value
from src.utils.exceptions import GenerationError


ROWS = [
    {'n': 0, 'p': 0.0, 'label': None},
    {'n': 1, 'p': 1 / 3, 'label': 'one'},
]


def test_format_value():
    """Test CSV cell formatting"""
    assert format_value(1 / 3) == "0.333333333333333"
    assert format_value(None) == ""
    assert format_value(True) == "true"
    assert format_value(7) == "7"
    assert format_value([0.5, 2]) == "0.5 2"


def test_write_csv_table(tmp_path):
    """Test writing a CSV table with fixed column order"""
    writer  = ArtifactWriter(tmp_path)
    path    = writer.write_table("grid", ROWS, ["n", "p", "label"])

    assert path == tmp_path / "grid.csv"
    assert path.read_text() == "n,p,label\n0,0,\n1,0.333333333333333,one\n"
    assert writer.stats['files_written'] == 1
    assert writer.stats['rows_written'] == 2


def test_write_json_table(tmp_path):
    """Test writing a JSON table"""
    writer  = ArtifactWriter(tmp_path, fmt="json")
    path    = writer.write_table("grid", ROWS, ["n", "p"])

    records = json.loads(path.read_text())
    assert records == [{'n': 0, 'p': 0.0}, {'n': 1, 'p': 1 / 3}]


def test_nested_output_directory(tmp_path):
    """Test the output directory is created on demand"""
    writer  = ArtifactWriter(tmp_path / "a" / "b")
    path    = writer.write_table("t", ROWS, ["n"])

    assert path.exists()


def test_manifest_records_outputs(tmp_path):
    """Test the manifest lists every written table"""
    writer      = ArtifactWriter(tmp_path)
    manifest    = RunManifest("chain", {'k': 1}, seed=1234)
    writer.write_table("chain", ROWS, ["n", "p"], manifest)
    path        = writer.write_manifest(manifest)

    assert path.name == "chain.manifest.json"
    document = json.loads(path.read_text())
    assert document['outputs'] == ["chain.csv"]
    assert document['parameters'] == {'k': 1}
    assert document['seed'] == 1234
    assert document['version'] == __version__
    assert document['duration_s'] >= 0.0


def test_unknown_format(tmp_path):
    """Test unknown table formats are rejected"""
    with pytest.raises(GenerationError):
        ArtifactWriter(tmp_path, fmt="xlsx")


def test_unwritable_output(tmp_path):
    """Test a file in place of the output directory fails"""
    blocker = tmp_path / "out"
    blocker.write_text("")

    with pytest.raises(GenerationError):
        ArtifactWriter(blocker).write_table("t", ROWS, ["n"])
