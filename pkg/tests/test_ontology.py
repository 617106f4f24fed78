import random

import pytest

from themeflow.errors import ConfigurationError, OntologyLoadError
from themeflow.ontology import (
    canonical_topic,
    load_ontology,
    load_ontology_file,
    normalize_label,
)


class TestNormalizeLabel:
    def test_hyphens_and_plural(self):
        assert normalize_label("Neural-Networks") == "neural network"

    def test_whitespace_collapse(self):
        assert normalize_label("  deep   learning ") == "deep learning"

    def test_short_token_keeps_plural_s(self):
        assert normalize_label("IoT") == "iot"
        assert normalize_label("gas") == "gas"

    def test_underscores(self):
        assert normalize_label("machine_learning") == "machine learning"

    def test_double_s_not_stripped(self):
        assert normalize_label("glass") == "glass"
        assert normalize_label("data access") == "data access"

    def test_idempotent_on_examples(self):
        for raw in [
            "Neural-Networks", "  deep   learning ", "IoT", "glass",
            "classes", "wireless sensor networks", "a-b_c", "GANs",
        ]:
            once = normalize_label(raw)
            assert normalize_label(once) == once

    def test_idempotent_random(self):
        rng = random.Random(2024)
        alphabet = "abcsz -_ASX0"
        for _ in range(500):
            raw = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 14)))
            once = normalize_label(raw)
            assert normalize_label(once) == once, raw


TRIPLES_EQUIV = [
    ("neural networks", "relatedEquivalent", "neural network"),
    ("machine learning", "superTopicOf", "deep learning"),
]


class TestLoadOntology:
    def test_equivalence_pair_resolves_to_one_id(self):
        onto = load_ontology(TRIPLES_EQUIV)
        a = canonical_topic(onto, "neural networks")
        b = canonical_topic(onto, "neural network")
        assert a is not None and a == b

    def test_super_topic_direction(self):
        # (S, super-topic-of, O): S is the broader topic of O
        onto = load_ontology(TRIPLES_EQUIV)
        dl = canonical_topic(onto, "deep learning")
        ml = canonical_topic(onto, "machine learning")
        assert ml in onto.super_topics[dl]

    def test_empty_is_fatal(self):
        with pytest.raises(ConfigurationError):
            load_ontology([])
        with pytest.raises(ConfigurationError):
            load_ontology([("a", "unknownPredicate", "b")])

    def test_unknown_label_misses(self):
        onto = load_ontology(TRIPLES_EQUIV)
        assert canonical_topic(onto, "unknown gibberish") is None

    def test_canonical_id_is_fixpoint(self):
        onto = load_ontology(TRIPLES_EQUIV)
        for label in list(onto.topics):
            assert canonical_topic(onto, label) == label

    def test_label_index_values_are_topics(self):
        onto = load_ontology(TRIPLES_EQUIV)
        assert set(onto.label_index.values()) <= set(onto.topics)

    def test_preferential_target_wins(self):
        onto = load_ontology(
            [
                ("ann", "relatedEquivalent", "artificial neural network"),
                ("ann", "preferentialEquivalent", "neural networks"),
            ]
        )
        assert canonical_topic(onto, "ann") == "neural network"
        assert canonical_topic(onto, "artificial neural network") == "neural network"

    def test_no_self_loops_in_super_topics(self):
        onto = load_ontology(
            [
                ("nets", "relatedEquivalent", "networks"),
                ("nets", "superTopicOf", "networks"),
                ("machine learning", "superTopicOf", "deep learning"),
            ]
        )
        for topic, supers in onto.super_topics.items():
            assert topic not in supers

    def test_equivalence_chain_collapses(self):
        rng = random.Random(5)
        labels = [f"topic {i:02d}" for i in range(12)]
        triples = [
            (labels[i], "relatedEquivalent", labels[i + 1]) for i in range(11)
        ]
        rng.shuffle(triples)
        onto = load_ontology(triples)
        ids = {canonical_topic(onto, lab) for lab in labels}
        assert ids == {"topic 00"}

    def test_row_order_invariance(self):
        triples = [
            ("a-topic", "relatedEquivalent", "b-topic"),
            ("b-topic", "relatedEquivalent", "c-topic"),
            ("root", "superTopicOf", "a-topic"),
            ("d-topic", "preferentialEquivalent", "e-topic"),
        ]
        rng = random.Random(99)
        reference = load_ontology(triples)
        for _ in range(10):
            shuffled = triples[:]
            rng.shuffle(shuffled)
            onto = load_ontology(shuffled)
            assert onto.label_index == reference.label_index
            assert onto.super_topics == reference.super_topics


class TestLoadOntologyFile:
    def test_csv_round_trip_with_uris(self, tmp_path):
        path = tmp_path / "onto.csv"
        path.write_text(
            "<https://x.org/topics/neural_networks>,"
            "<https://x.org/schema#relatedEquivalent>,"
            "<https://x.org/topics/neural_network>\n"
            "<https://x.org/topics/machine_learning>,"
            "<https://x.org/schema#superTopicOf>,"
            "<https://x.org/topics/deep_learning>\n"
            "only-two-columns,oops\n"
        )
        onto = load_ontology_file(str(path))
        assert canonical_topic(onto, "Neural Networks") == canonical_topic(
            onto, "neural network"
        )
        assert len(onto.source_checksum) == 64

    def test_missing_file(self, tmp_path):
        with pytest.raises(OntologyLoadError):
            load_ontology_file(str(tmp_path / "nope.csv"))

    def test_checksum_tracks_content(self, tmp_path):
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        p1.write_text("x,relatedEquivalent,y\n")
        p2.write_text("x,relatedEquivalent,z\n")
        o1, o2 = load_ontology_file(str(p1)), load_ontology_file(str(p2))
        assert o1.source_checksum != o2.source_checksum
