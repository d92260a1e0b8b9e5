import random

import pytest

from hitfam.harness import AnnotatedPoset
from hitfam.poset import tree_from_parents


def synthetic_annotated_tree(seed: int, n: int, racing: int) -> AnnotatedPoset:
    """Random tree on ``n`` events with races among exactly ``racing`` events."""
    rng = random.Random(seed)
    names = [f"v{i}" for i in range(n)]
    parents = {names[0]: None}
    for i in range(1, n):
        parents[names[i]] = names[rng.randrange(i)]
    tree = tree_from_parents(parents)
    chosen = rng.sample(names, racing)
    races = set()
    for a in chosen:
        partners = [b for b in chosen if b != a]
        if partners:
            races.add(frozenset((a, rng.choice(partners))))
    return AnnotatedPoset(tree, frozenset(races))



# criterion number -> (title, verdict), filled as acceptance tests run
_ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): numbered acceptance criterion")


@pytest.hookimpl(wrapper=True)
def pytest_runtest_makereport(item, call):
    report = yield
    marker = item.get_closest_marker("acceptance")
    if marker is not None and (report.when == "call" or report.failed):
        number, title = marker.args
        ok = report.passed and _ACCEPTANCE.get(number, (title, "PASS"))[1] == "PASS"
        _ACCEPTANCE[number] = (title, "PASS" if ok else "FAIL")
    return report


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, verdict = _ACCEPTANCE[number]
        terminalreporter.write_line(f"[{verdict}] criterion {number:2d}: {title}")
