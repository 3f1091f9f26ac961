from __future__ import annotations

import pytest

import corpusgen
from argrel.corpus_client import CorpusSnapshot, load_local
from argrel.dataset import PairDataset
from argrel.pair_compiler import CompileConfig, compile_corpus


@pytest.fixture(scope="session")
def mini_snapshot() -> CorpusSnapshot:
    return load_local(corpusgen.MINICORPUS_DIR, "minicorpus")


@pytest.fixture(scope="session")
def mini_dataset(mini_snapshot) -> PairDataset:
    return compile_corpus(mini_snapshot, CompileConfig())


@pytest.fixture(scope="session")
def us_like_dir(tmp_path_factory):
    directory = tmp_path_factory.mktemp("us2016_like")
    corpusgen.write_corpus(directory, corpusgen.generate_corpus(corpusgen.us2016_like_specs(), seed=7))
    return directory


@pytest.fixture(scope="session")
def us_like_snapshot(us_like_dir) -> CorpusSnapshot:
    return load_local(us_like_dir, "us2016-like")


@pytest.fixture(scope="session")
def us_like_dataset(us_like_snapshot) -> PairDataset:
    return compile_corpus(us_like_snapshot, CompileConfig())
