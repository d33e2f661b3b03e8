import random

import pytest
from hypothesis import strategies as st

from prefixmonoid.words import Word


def W(text: str) -> Word:
    return Word.parse(text)


def random_word(rng: random.Random, gens, length: int, reduced: bool = True) -> Word:
    letters = []
    while len(letters) < length:
        letter = (rng.choice(gens), rng.choice((1, -1)))
        if reduced and letters and letters[-1] == (letter[0], -letter[1]):
            continue
        letters.append(letter)
    return Word(letters)


def words_over(gens="ab", max_size=12):
    letter = st.tuples(st.sampled_from(list(gens)), st.sampled_from([1, -1]))
    return st.lists(letter, max_size=max_size).map(Word)


@pytest.fixture
def rng():
    return random.Random(20261018)


# ----- one summary line per acceptance criterion ------------------------------------------

_criteria: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None or call.when not in ("setup", "call"):
        return
    number, title = mark.args
    failed = call.excinfo is not None
    prev = _criteria.get(number, (title, True, 0.0))
    _criteria[number] = (title, prev[1] and not failed, prev[2] + call.duration)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok, seconds = _criteria[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title} ({seconds:.1f}s)")
