import pytest

from locfaults import cfg, corpus
from locfaults.frontend import load


@pytest.fixture(scope="session")
def programs():
    """name -> (Entry, TypedProgram, counterexample) for the shipped corpus."""
    out = {}
    for e in corpus.entries():
        text, ce = e.instantiate()
        out[e.name] = (e, load(text), ce)
    return out


def prepared(name, b=None):
    e = corpus.get(name)
    text, ce = e.instantiate(b)
    tp = load(text)
    return tp, cfg.prepare(tp, b or e.b), ce
