import logging

import numpy as np
import pytest
from PIL import Image

from datasets.loader import decode_luminance, load_pair, load_pairs
from datasets.manifest import ManifestEntry, filter_split, parse_manifest, write_manifest
from utils.errors import DecodeError, DimensionMismatch, ParseError

HEADER = "ref_path,test_path,mos,algorithm,scale,split\n"


def write(tmp_path, body, name="m.csv"):
    path = tmp_path / name
    path.write_text(HEADER + body, encoding="utf-8")
    return path


def test_header_only_manifest_is_empty(tmp_path):
    assert parse_manifest(write(tmp_path, "")) == []


def test_single_row(tmp_path):
    entries = parse_manifest(write(tmp_path, "a.png,b.png,3.5,X,2,train\n"))
    assert len(entries) == 1
    e = entries[0]
    assert e.ref_path == tmp_path / "a.png"
    assert e.test_path == tmp_path / "b.png"
    assert (e.mos, e.algorithm, e.scale, e.split) == (3.5, "X", 2, "train")
    assert e.line_number == 2


def test_blank_optional_fields_take_defaults(tmp_path):
    e = parse_manifest(write(tmp_path, "# unlabeled\na.png,b.png,,,,\n"))[0]
    assert e.mos is None and not e.labeled
    assert (e.scale, e.split, e.algorithm) == (1, "all", "")


def test_non_numeric_mos_reports_its_line(tmp_path):
    with pytest.raises(ParseError) as info:
        parse_manifest(write(tmp_path, "a.png,b.png,1.0,X,1,train\na.png,c.png,abc,X,1,train\n"))
    assert info.value.line_number == 3
    assert "3" in str(info.value)


@pytest.mark.parametrize("row", [
    "a.png,b.png,1.0,X,1\n",
    "a.png,b.png,1.0,X,0,train\n",
    "a.png,b.png,1.0,X,1,validation\n",
    ",b.png,1.0,X,1,train\n",
])
def test_malformed_rows(tmp_path, row):
    with pytest.raises(ParseError):
        parse_manifest(write(tmp_path, row))


def test_quoted_path_may_span_lines(tmp_path):
    body = (
        "\"scans\n# not a comment\nref.png\",b.png,1.0,X,1,train\n"
        "# comment\n"
        "a.png,c.png,2.0,Y,1,test\n"
        "a.png,d.png,oops,Y,1,test\n"
    )
    with pytest.raises(ParseError) as info:
        parse_manifest(write(tmp_path, body))
    assert info.value.line_number == 7

    entries = parse_manifest(write(tmp_path, body.rsplit("a.png,d.png", 1)[0]))
    assert [e.line_number for e in entries] == [2, 6]
    assert entries[0].ref_path == tmp_path / "scans\n# not a comment\nref.png"
    assert entries[1].test_path == tmp_path / "c.png"


def test_bad_header(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("reference,test\na.png,b.png\n", encoding="utf-8")
    with pytest.raises(ParseError):
        parse_manifest(path)


def test_duplicates_are_kept_and_flagged(tmp_path, caplog):
    with caplog.at_level(logging.WARNING):
        entries = parse_manifest(write(tmp_path, "a.png,b.png,1,X,1,train\na.png,b.png,2,X,1,train\n"))
    assert [e.duplicate for e in entries] == [False, True]
    assert "Duplicate" in caplog.text


def test_filter_split_includes_rows_marked_all(tmp_path):
    entries = parse_manifest(write(tmp_path, "a.png,b.png,1,X,1,train\na.png,c.png,2,X,1,test\na.png,d.png,3,X,1,all\n"))
    assert [e.test_path.name for e in filter_split(entries, "train")] == ["b.png", "d.png"]
    assert [e.test_path.name for e in filter_split(entries, "test")] == ["c.png", "d.png"]
    assert len(filter_split(entries, "all")) == 3


def test_written_manifest_parses_back(tmp_path):
    entries = [
        ManifestEntry(tmp_path / "r.png", tmp_path / "t.png", mos=0.1, algorithm="A", scale=2, split="test"),
        ManifestEntry(tmp_path / "r.png", tmp_path / "u.png"),
    ]
    parsed = parse_manifest(write_manifest(entries, tmp_path / "out.csv", comment="two rows"))
    assert [(e.test_path, e.mos, e.scale, e.split) for e in parsed] == [
        (tmp_path / "t.png", 0.1, 2, "test"),
        (tmp_path / "u.png", None, 1, "all"),
    ]


def test_gray_decodes_to_unit_range(tmp_path):
    path = tmp_path / "gray.png"
    Image.fromarray(np.full((8, 8), 255, dtype=np.uint8)).save(path)
    assert np.all(decode_luminance(path).data == 1.0)


def test_red_uses_bt601_weight(tmp_path):
    rgb = np.zeros((4, 4, 3), dtype=np.uint8)
    rgb[..., 0] = 255
    path = tmp_path / "red.png"
    Image.fromarray(rgb).save(path)
    assert decode_luminance(path).data == pytest.approx(np.full((4, 4), 0.299))


def test_sixteen_bit_gray(tmp_path):
    path = tmp_path / "deep.png"
    Image.fromarray(np.full((4, 4), 65535, dtype=np.uint16)).save(path)
    assert decode_luminance(path).data == pytest.approx(np.ones((4, 4)))


def test_undecodable_file(tmp_path):
    path = tmp_path / "junk.png"
    path.write_bytes(b"not an image")
    with pytest.raises(DecodeError):
        decode_luminance(path)
    with pytest.raises(DecodeError):
        decode_luminance(tmp_path / "missing.png")


def test_size_mismatch(tmp_path):
    Image.fromarray(np.zeros((8, 8), dtype=np.uint8)).save(tmp_path / "a.png")
    Image.fromarray(np.zeros((8, 9), dtype=np.uint8)).save(tmp_path / "b.png")
    with pytest.raises(DimensionMismatch):
        load_pair(ManifestEntry(tmp_path / "a.png", tmp_path / "b.png"))


def test_load_pairs_accounts_for_every_entry(synthetic_manifest):
    entries = parse_manifest(synthetic_manifest)[:5]
    entries.append(ManifestEntry(entries[0].ref_path, synthetic_manifest.parent / "gone.png", line_number=99))
    pairs, exclusions = load_pairs(entries)
    assert len(pairs) == 5
    assert len(exclusions) == 1
    assert exclusions[0].reason == "DecodeError"
    assert exclusions[0].entry.line_number == 99


def test_loading_is_deterministic(synthetic_manifest):
    entry = parse_manifest(synthetic_manifest)[0]
    assert load_pair(entry).test == load_pair(entry).test


def test_synthetic_manifest_layout(synthetic_manifest):
    entries = parse_manifest(synthetic_manifest)
    assert len(entries) == 56
    assert {e.split for e in entries} == {"train", "test"}
    assert all(e.labeled and e.test_path.is_file() for e in entries)


def nan_tiff(path):
    samples = np.full((16, 16), 0.5, dtype=np.float32)
    samples[3, 4] = np.nan
    Image.fromarray(samples).save(path)
    return path


def test_non_finite_samples_fail_to_decode(tmp_path):
    with pytest.raises(DecodeError, match="non-finite"):
        decode_luminance(nan_tiff(tmp_path / "nan.tif"))


def test_load_pairs_excludes_non_finite_images(synthetic_manifest, tmp_path):
    entries = parse_manifest(synthetic_manifest)[:3]
    entries.insert(1, ManifestEntry(nan_tiff(tmp_path / "ref.tif"), nan_tiff(tmp_path / "test.tif"), line_number=42))
    pairs, exclusions = load_pairs(entries)
    assert len(pairs) == 3
    assert [(x.reason, x.entry.line_number) for x in exclusions] == [("DecodeError", 42)]
