import logging

import pytest

from claimsift.corpus import load_passages
from claimsift.demo import generate_demo_corpus
from claimsift.schema import default_lexicon, default_schema

logging.getLogger("claimsift").setLevel(logging.ERROR)

DEMO_SEED = 7


@pytest.fixture(scope="session")
def demo_corpus_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("demo_corpus")
    generate_demo_corpus(DEMO_SEED, out)
    return out


@pytest.fixture(scope="session")
def demo_passages(demo_corpus_dir):
    return load_passages(demo_corpus_dir / "passages.jsonl")


@pytest.fixture(scope="session")
def schema():
    return default_schema()


@pytest.fixture(scope="session")
def lexicon():
    lex = default_lexicon()
    lex.validate(default_schema())
    return lex
