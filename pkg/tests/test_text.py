import random
import string

import pytest

from qags.text import normalize_answer, tokenize

from oracles import oracle_normalize


@pytest.mark.parametrize(
    "text,expected",
    [
        ("Usman Khan", ["Usman", "Khan"]),
        ("", []),
        ("a  large\tknife", ["a", "large", "knife"]),
        ("  leading and trailing  ", ["leading", "and", "trailing"]),
    ],
)
def test_tokenize(text, expected):
    assert tokenize(text) == expected


@pytest.mark.parametrize(
    "text,expected",
    [
        ("a large knife", ["large", "knife"]),
        ("Fishmongers' Hall", ["fishmongers", "hall"]),
        ("The A-Team", ["ateam"]),
        ("The.", []),
        ("", []),
        ("AN Apple a day", ["apple", "day"]),
    ],
)
def test_normalize_answer(text, expected):
    assert normalize_answer(text) == expected


def _random_text(rng):
    chars = string.ascii_letters + string.digits + ".,-'\"?! \tthe an a"
    return "".join(rng.choice(chars) for _ in range(rng.randrange(0, 40)))


def test_normalize_is_idempotent():
    rng = random.Random(20240)
    for _ in range(500):
        text = _random_text(rng)
        once = normalize_answer(text)
        assert normalize_answer(" ".join(once)) == once


def test_tokenize_round_trip_and_no_empty_tokens():
    rng = random.Random(20241)
    for _ in range(500):
        text = _random_text(rng)
        tokens = tokenize(text)
        assert all(tok and not any(c.isspace() for c in tok) for tok in tokens)
        assert tokenize(" ".join(tokens)) == tokens


def test_normalize_matches_oracle_on_random_text():
    rng = random.Random(20242)
    for _ in range(500):
        text = _random_text(rng)
        assert normalize_answer(text) == oracle_normalize(text)


def test_normalize_output_is_lowercase_and_punctuation_free():
    rng = random.Random(20243)
    for _ in range(200):
        for token in normalize_answer(_random_text(rng)):
            assert token == token.lower()
            assert token not in ("a", "an", "the")
