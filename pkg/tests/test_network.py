"""Network types, validation findings, and the canonical JSON file format."""

import json

import pytest

from bncritic import corpus
from bncritic.errors import ParseError, ValidationError
from bncritic.network import (
    LATENT,
    OBSERVABLE,
    Cpt,
    Network,
    Variable,
    load_network,
    network_id,
    save_network,
    validate,
)


def _codes(report):
    return {f.code for f in report.findings}


class TestValidate:
    def test_md_model_has_zero_errors(self, md):
        report = validate(md)
        assert report.ok
        assert report.errors == ()

    def test_row_sum_error(self):
        net = Network(
            (Variable("X", OBSERVABLE, ("a", "b")),),
            (Cpt("X", (), ((0.5, 0.4),)),),
        )
        report = validate(net)
        assert not report.ok
        assert "CPT_ROW_SUM" in _codes(report)
        assert any("row0" in f.location for f in report.errors)

    def test_two_cycle(self):
        net = Network(
            (
                Variable("A", OBSERVABLE, ("0", "1")),
                Variable("B", OBSERVABLE, ("0", "1")),
            ),
            (
                Cpt("A", ("B",), ((0.5, 0.5), (0.5, 0.5))),
                Cpt("B", ("A",), ((0.5, 0.5), (0.5, 0.5))),
            ),
        )
        assert "CYCLE" in _codes(validate(net))

    def test_no_observable(self):
        net = Network(
            (Variable("T", LATENT, ("0", "1")),),
            (Cpt("T", (), ((0.5, 0.5),)),),
        )
        assert "NO_OBSERVABLE" in _codes(validate(net))

    def test_row_count_mismatch(self):
        net = Network(
            (
                Variable("A", OBSERVABLE, ("0", "1")),
                Variable("B", OBSERVABLE, ("0", "1")),
            ),
            (
                Cpt("A", (), ((0.5, 0.5),)),
                Cpt("B", ("A",), ((0.5, 0.5),)),  # needs 2 rows
            ),
        )
        assert "CPT_ROW_COUNT" in _codes(validate(net))

    def test_validate_is_pure(self, md):
        assert validate(md) == validate(md)


class TestTopologicalOrder:
    def test_ties_broken_by_name(self):
        net = Network(
            (
                Variable("b", OBSERVABLE, ("0", "1")),
                Variable("a", OBSERVABLE, ("0", "1")),
            ),
            (
                Cpt("b", (), ((0.5, 0.5),)),
                Cpt("a", (), ((0.5, 0.5),)),
            ),
        )
        assert net.topological_order() == ("a", "b")

    def test_parents_before_children(self, md):
        order = md.topological_order()
        pos = {n: i for i, n in enumerate(order)}
        for parent, child in md.edges():
            assert pos[parent] < pos[child]


class TestFileFormat:
    def test_round_trip_all_corpus_networks(self, all_models):
        for name, net in all_models.items():
            assert load_network(save_network(net)) == net, name

    def test_save_deterministic(self, md):
        assert save_network(md) == save_network(md)

    def test_shipped_file_equals_builder(self, md):
        text = corpus.corpus_file_text("data_generation.json")
        assert load_network(text) == md

    def test_shipped_files_are_canonical(self):
        for name in corpus.MODEL_NAMES:
            text = corpus.corpus_file_text(corpus.model_slug(name) + ".json")
            assert save_network(load_network(text)).decode() == text, name

    def test_malformed_json(self):
        with pytest.raises(ParseError):
            load_network(b"{not json")

    def test_missing_top_level_keys(self):
        with pytest.raises(ParseError):
            load_network(json.dumps({"variables": []}))

    def test_wrong_row_length_is_validation_error(self):
        doc = {
            "variables": [{"name": "X", "role": "observable", "states": ["a", "b"]}],
            "cpts": [{"child": "X", "parents": [], "table": [[0.5, 0.3, 0.2]]}],
        }
        with pytest.raises(ValidationError) as exc:
            load_network(json.dumps(doc))
        assert any(f.code == "CPT_ROW_LENGTH" for f in exc.value.report.errors)

    def test_renormalize_option(self):
        doc = {
            "variables": [{"name": "X", "role": "observable", "states": ["a", "b"]}],
            "cpts": [{"child": "X", "parents": [], "table": [[2.0, 2.0]]}],
        }
        with pytest.raises(ValidationError):
            load_network(json.dumps(doc))
        net = load_network(json.dumps(doc), renormalize=True)
        assert net.cpt("X").table == ((0.5, 0.5),)

    def test_save_rejects_invalid_network(self):
        net = Network(
            (Variable("X", OBSERVABLE, ("a", "b")),),
            (Cpt("X", (), ((0.9, 0.9),)),),
        )
        with pytest.raises(ValidationError):
            save_network(net)

    def test_network_id_stable_and_distinct(self, all_models):
        ids = {network_id(net) for net in all_models.values()}
        assert len(ids) == len(all_models)
        md = all_models["Data Generation"]
        assert network_id(md) == network_id(md)
