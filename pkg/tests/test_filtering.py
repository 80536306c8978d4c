import math
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from snsim.filtering import (
    Corpus,
    FilterRule,
    KeywordConstraint,
    idf,
    load_rules,
    match_rules,
    tf,
    tfidf,
    tokenize,
)

tokens = st.lists(st.sampled_from("abcdefg"), min_size=1, max_size=12)
corpora = st.lists(tokens, min_size=1, max_size=8).map(
    lambda docs: Corpus(tuple(tuple(d) for d in docs)))


def oracle_tfidf(term, document, corpus):
    """Independent direct-count implementation used as the test oracle."""
    counts = Counter(document)
    tf_value = counts[term] / sum(counts.values())
    if tf_value == 0.0:
        return 0.0
    df = sum(1 for doc in corpus.documents if term in doc)
    return tf_value * math.log(len(corpus.documents) / df)


TWO_DOC_CORPUS = Corpus((("a", "b", "a"), ("b", "c")))


class TestTf:
    def test_direct_count(self):
        assert tf("a", ["a", "b", "a"]) == 2 / 3

    def test_absent_term(self):
        assert tf("z", ["a", "b", "a"]) == 0.0

    def test_single_token_document(self):
        assert tf("a", ["a"]) == 1.0

    def test_empty_document_rejected(self):
        with pytest.raises(ValueError, match="empty document"):
            tf("a", [])

    @given(tokens)
    def test_sums_to_one_over_distinct_terms(self, document):
        assert math.isclose(sum(tf(t, document) for t in set(document)), 1.0,
                            abs_tol=1e-12)


class TestIdf:
    def test_term_in_every_document_scores_zero(self):
        assert idf("b", TWO_DOC_CORPUS) == 0.0

    def test_half_the_documents(self):
        assert abs(idf("c", TWO_DOC_CORPUS) - math.log(2)) <= 1e-12

    def test_unseen_term_rejected(self):
        with pytest.raises(ValueError, match="term not in corpus"):
            idf("z", TWO_DOC_CORPUS)


class TestTfidf:
    def test_two_document_fixture(self):
        got = tfidf("a", TWO_DOC_CORPUS.documents[0], TWO_DOC_CORPUS)
        expected = oracle_tfidf("a", TWO_DOC_CORPUS.documents[0], TWO_DOC_CORPUS)
        assert abs(got - expected) <= 1e-12
        assert abs(got - (2 / 3) * math.log(2)) <= 1e-12
        assert round(got, 4) == 0.4621

    def test_term_in_all_documents_is_exactly_zero(self):
        assert tfidf("b", TWO_DOC_CORPUS.documents[0], TWO_DOC_CORPUS) == 0.0

    def test_absent_term_is_zero(self):
        assert tfidf("q", TWO_DOC_CORPUS.documents[0], TWO_DOC_CORPUS) == 0.0

    @given(corpora, st.integers(0, 7), st.sampled_from("abcdefg"))
    def test_matches_direct_count_oracle(self, corpus, doc_index, term):
        document = corpus.documents[doc_index % len(corpus.documents)]
        if term not in document:
            assert tfidf(term, document, corpus) == 0.0
        else:
            assert abs(tfidf(term, document, corpus)
                       - oracle_tfidf(term, document, corpus)) <= 1e-12

    @given(corpora, st.sampled_from("abcdefg"))
    def test_zero_iff_absent_or_universal(self, corpus, term):
        document = corpus.documents[0]
        score = tfidf(term, document, corpus)
        absent = term not in document
        universal = all(term in doc for doc in corpus.documents)
        assert (score == 0.0) == (absent or universal)

    @given(corpora, st.sampled_from("abcdefg"))
    def test_invariant_under_corpus_duplication(self, corpus, term):
        document = corpus.documents[0]
        doubled = Corpus(corpus.documents + corpus.documents)
        assert tfidf(term, document, corpus) == tfidf(term, document, doubled)


class TestTokenize:
    def test_lowercases_and_splits_punctuation(self):
        assert tokenize("Good day, I LIKE it!") == ["good", "day", "i", "like", "it"]

    def test_corpus_from_texts(self):
        corpus = Corpus.from_texts(["a b a", "b c"])
        assert corpus.documents == (("a", "b", "a"), ("b", "c"))


class TestMatchRules:
    POST = ("[R][10][10]", 4, ("good", "spot", "good"))

    def test_empty_rule_list(self):
        assert match_rules(self.POST, [], TWO_DOC_CORPUS) is None

    def test_pattern_and_evaluation_match(self):
        rule = FilterRule(id=5, category_pattern="[R][10][10]", min_evaluation=3)
        assert match_rules(self.POST, [rule], TWO_DOC_CORPUS) == 5

    def test_low_evaluation_blocks(self):
        rule = FilterRule(id=5, category_pattern="[R][10][10]", min_evaluation=3)
        post = ("[R][10][10]", 2, ())
        assert match_rules(post, [rule], TWO_DOC_CORPUS) is None

    def test_wrong_category_blocks(self):
        rule = FilterRule(id=5, category_pattern="[R][01][01]", min_evaluation=0)
        assert match_rules(self.POST, [rule], TWO_DOC_CORPUS) is None

    def test_lower_id_wins_ties(self):
        rules = [
            FilterRule(id=9, category_pattern="[R][10][10]", min_evaluation=0),
            FilterRule(id=4, category_pattern="[R][10][10]", min_evaluation=0),
        ]
        assert match_rules(self.POST, rules, TWO_DOC_CORPUS) == 4

    def test_keyword_floor_enforced(self):
        corpus = Corpus((("good", "spot"), ("bad", "spot")))
        post = ("[R][10][10]", 4, ("good", "spot", "good"))
        passing = FilterRule(id=1, category_pattern="[R][10][10]", min_evaluation=0,
                             keywords=(KeywordConstraint("good", 0.3),))
        failing = FilterRule(id=2, category_pattern="[R][10][10]", min_evaluation=0,
                             keywords=(KeywordConstraint("good", 10.0),))
        assert match_rules(post, [passing], corpus) == 1
        assert match_rules(post, [failing], corpus) is None

    def test_keyword_unknown_to_corpus_scores_zero(self):
        rule = FilterRule(id=1, category_pattern="[R][10][10]", min_evaluation=0,
                          keywords=(KeywordConstraint("zzz", 0.1),))
        assert match_rules(self.POST, [rule], TWO_DOC_CORPUS) is None

    def test_bad_min_evaluation_rejected(self):
        with pytest.raises(ValueError, match="min_evaluation"):
            FilterRule(id=1, category_pattern="x", min_evaluation=5)


class TestLoading:
    def test_corpus_from_file(self, tmp_path):
        path = tmp_path / "corpus.txt"
        path.write_text("Nice beach, great food\n\nQuiet shrine\n", encoding="utf-8")
        corpus = Corpus.from_file(path)
        assert len(corpus) == 2
        assert corpus.documents[0] == ("nice", "beach", "great", "food")

    def test_rules_from_toml(self, tmp_path):
        path = tmp_path / "rules.toml"
        path.write_text(
            '[[rules]]\nid = 5\ncategory_pattern = "[R][10][10]"\n'
            'min_evaluation = 3\nkeywords = [{term = "beach", min_tfidf = 0.2}]\n'
            '[[rules]]\nid = 8\ncategory_pattern = "[R][11][10]"\nmin_evaluation = 0\n',
            encoding="utf-8")
        rules = load_rules(path)
        assert [r.id for r in rules] == [5, 8]
        assert rules[0].keywords[0].term == "beach"
