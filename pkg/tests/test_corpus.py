from concurrent.futures import ThreadPoolExecutor

import pytest

from modtt.elaborate import elaborate_program, emit_core
from modtt.errors import TypeCheckError

from corpus_util import BAD, GOLDEN, GOOD


@pytest.mark.parametrize("path", GOOD, ids=lambda p: p.name)
def test_good_files_check(path):
    elaborate_program(path.read_text())


@pytest.mark.parametrize("path", BAD, ids=lambda p: p.name)
def test_bad_files_fail_with_their_kind(path):
    want = path.with_suffix(".kind").read_text().strip()
    with pytest.raises(TypeCheckError) as e:
        elaborate_program(path.read_text())
    assert e.value.kind == want
    assert e.value.span is not None


@pytest.mark.parametrize("path", GOOD, ids=lambda p: p.name)
def test_golden_core(path):
    golden = GOLDEN / (path.stem + ".core")
    assert emit_core(elaborate_program(path.read_text())) == golden.read_text()


def test_files_are_independent():
    # per-file pipelines share no state
    def run(p):
        return emit_core(elaborate_program(p.read_text()))

    with ThreadPoolExecutor(4) as pool:
        parallel = list(pool.map(run, GOOD))
    assert parallel == [run(p) for p in GOOD]
