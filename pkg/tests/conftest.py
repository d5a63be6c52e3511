import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fuzzterm import generate_corpus, load_bundled


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # first inference triggers JIT compilation; keep it out of timed tests
    kb = load_bundled("emph")
    kb.system().infer(
        {"Frequency": 0.5, "Title": 0.5, "Emphasis": 0.5, "Position": 0.5}
    )
    kb.aux_system().infer({"TermPosition": 0.5})


@pytest.fixture(scope="session")
def corpus_dir_400(tmp_path_factory):
    out = tmp_path_factory.mktemp("corpus400")
    generate_corpus(
        out,
        categories=4,
        docs_per_category=100,
        mode="uniform",
        seed=11,
        topic_fraction=0.6,
    )
    return out


@pytest.fixture(scope="session")
def corpus_dir_200(tmp_path_factory):
    out = tmp_path_factory.mktemp("corpus200")
    generate_corpus(out, categories=4, docs_per_category=50, mode="zipf", seed=5)
    return out
