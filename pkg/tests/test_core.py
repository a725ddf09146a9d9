import json

import numpy as np
import pytest

from descshot.core import (
    DescriptorKey,
    DescriptorSet,
    LabeledScores,
    SimilarityMatrix,
    normalize_descriptor,
    read_descriptor_sets,
    read_scores,
    read_similarity_matrix,
    write_scores,
    write_similarity_matrix,
)
from descshot.errors import ParseError, ValidationError

from _synthetic import make_matrix, random_matrix


def test_descriptor_key_roundtrip_unicode():
    key = DescriptorKey(-1, 7, "große, runde Form — weich")
    assert DescriptorKey.decode(key.encode()) == key
    assert "," not in key.encode()


def test_descriptor_key_rejects_bad_tokens():
    with pytest.raises(ParseError):
        DescriptorKey.decode("2:0:YWJj")
    with pytest.raises(ParseError):
        DescriptorKey.decode("+1:x:YWJj")
    with pytest.raises(ParseError):
        DescriptorKey.decode("+1:0")


def test_matrix_roundtrip_small(tmp_path):
    m = make_matrix(
        [[0.25, -1.5, 3.125, 0.0], [1e-7, 2.0, -0.5, 9.0], [0.1, 0.2, 0.3, 0.4]],
        [1, -1, 1],
        d_pos=2,
    )
    path = tmp_path / "m.csv"
    write_similarity_matrix(m, path)
    back = read_similarity_matrix(path)
    assert back.image_ids == m.image_ids
    assert np.array_equal(back.labels, m.labels)
    assert back.descriptor_keys == m.descriptor_keys
    assert np.array_equal(back.values, m.values)
    assert m.values.shape == (3, 4)


def test_matrix_roundtrip_random_bit_exact(tmp_path, rng):
    for trial in range(25):
        m = random_matrix(rng)
        path = tmp_path / f"m{trial}.csv"
        write_similarity_matrix(m, path)
        back = read_similarity_matrix(path)
        assert np.array_equal(back.values, m.values), "17g round-trip must be exact"
        assert back.descriptor_keys == m.descriptor_keys


def test_matrix_roundtrip_awkward_values(tmp_path):
    vals = [[1e-300, 1e300, np.pi, 2.0 ** -1074], [-np.pi, 0.1 + 0.2, 5e-324, -0.0]]
    m = make_matrix(vals, [1, -1], d_pos=2)
    path = tmp_path / "m.csv"
    write_similarity_matrix(m, path)
    assert np.array_equal(read_similarity_matrix(path).values, m.values)


def test_empty_matrix_roundtrip(tmp_path):
    m = SimilarityMatrix(
        (), np.array([], dtype=np.int64), (DescriptorKey(1, 0, "a"), DescriptorKey(-1, 0, "b")),
        np.zeros((0, 2)),
    )
    path = tmp_path / "empty.csv"
    write_similarity_matrix(m, path)
    assert path.read_text() == "image_id,label,+1:0:YQ,-1:0:Yg\n"
    back = read_similarity_matrix(path)
    assert back.n_images == 0 and back.n_descriptors == 2


def test_one_by_one_matrix_cell(tmp_path):
    m = SimilarityMatrix(
        ("img",), np.array([1]), (DescriptorKey(1, 0, "a"),), np.array([[0.5]])
    )
    path = tmp_path / "m.csv"
    write_similarity_matrix(m, path)
    assert path.read_text().splitlines()[1] == "img,+1,0.5"


def test_bad_label_token_names_row(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("image_id,label,+1:0:YQ,-1:0:Yg\na,+1,1.0,2.0\nb,2,1.0,2.0\n")
    with pytest.raises(ParseError, match="line 3.*'2'"):
        read_similarity_matrix(path)


def test_nan_value_names_row_and_column(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("image_id,label,+1:0:YQ,-1:0:Yg\na,+1,1.0,NaN\n")
    with pytest.raises(ParseError, match=r"line 2.*-1:0:Yg.*[Nn]a[Nn]"):
        read_similarity_matrix(path)


def test_duplicate_image_id_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("image_id,label,+1:0:YQ,-1:0:Yg\na,+1,1,2\na,-1,3,4\n")
    with pytest.raises(ParseError, match="duplicate image_id"):
        read_similarity_matrix(path)


def test_malformed_header_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("id,label,+1:0:YQ\na,+1,1\n")
    with pytest.raises(ParseError, match="line 1"):
        read_similarity_matrix(path)


def test_wrong_field_count_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("image_id,label,+1:0:YQ,-1:0:Yg\na,+1,1.0\n")
    with pytest.raises(ParseError, match="line 2"):
        read_similarity_matrix(path)


def test_matrix_validation_rejects_nonfinite_and_bad_labels():
    with pytest.raises(ValidationError, match="non-finite"):
        make_matrix([[np.inf, 0.0]], [1])
    with pytest.raises(ValidationError, match=r"\+1 or -1"):
        make_matrix([[0.0, 0.0]], [2])


def test_matrix_rejects_comma_in_image_id():
    with pytest.raises(ValidationError):
        make_matrix([[0.0, 1.0]], [1], image_ids=("a,b",))


def test_matrix_rejects_duplicate_keys():
    keys = (DescriptorKey(1, 0, "a"), DescriptorKey(1, 0, "a"))
    with pytest.raises(ValidationError, match="duplicate descriptor key"):
        SimilarityMatrix(("x",), np.array([1]), keys, np.zeros((1, 2)))


def test_descriptor_set_casefold_duplicate():
    with pytest.raises(ValidationError, match="duplicate"):
        DescriptorSet("s", 1, "c", ("Round Shape", "round shape"))


def test_descriptor_set_empty_and_blank():
    with pytest.raises(ValidationError):
        DescriptorSet("s", 1, "c", ())
    with pytest.raises(ValidationError):
        DescriptorSet("s", 1, "c", ("ok", "   "))


def test_descriptor_sets_json(tmp_path):
    payload = [
        {
            "set_id": "run1-malignant",
            "class_label": 1,
            "class_name": "malignant",
            "descriptors": [f"descriptor {i}" for i in range(20)],
            "provenance": "run1",
        },
        {
            "set_id": "run1-benign",
            "class_label": -1,
            "class_name": "benign",
            "descriptors": [f"benign descriptor {i}" for i in range(20)],
            "provenance": "run1",
        },
    ]
    path = tmp_path / "sets.json"
    path.write_text(json.dumps(payload))
    sets = read_descriptor_sets(path)
    assert len(sets) == 2
    assert [len(s.descriptors) for s in sets] == [20, 20]
    assert sets[0].class_label == 1 and sets[1].class_label == -1


def test_descriptor_sets_json_errors(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps([{"set_id": "s", "class_name": "c", "descriptors": ["a"]}]))
    with pytest.raises(ParseError, match="class_label"):
        read_descriptor_sets(path)
    path.write_text(
        json.dumps([{"class_label": 1, "class_name": "c", "descriptors": []}])
    )
    with pytest.raises(ParseError, match="empty"):
        read_descriptor_sets(path)
    path.write_text(
        json.dumps([{"class_label": 1, "class_name": "c", "descriptors": ["A b", "a B"]}])
    )
    with pytest.raises(ParseError, match="duplicate"):
        read_descriptor_sets(path)


def test_scores_roundtrip(tmp_path, rng):
    n = 17
    labels = np.where(rng.random(n) < 0.5, 1, -1)
    labels[:2] = (1, -1)
    scores = rng.normal(size=n)
    table = LabeledScores(tuple(f"i{k}" for k in range(n)), labels, scores)
    path = tmp_path / "scores.csv"
    write_scores(table, path)
    back = read_scores(path)
    assert back.image_ids == table.image_ids
    assert np.array_equal(back.labels, table.labels)
    assert np.array_equal(back.scores, table.scores)


def test_normalize_descriptor():
    assert normalize_descriptor("  Round Shape \n") == "round shape"
