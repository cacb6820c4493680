import pytest

from plumb.graph import random_negdef_graph


def corpus(count: int = 200, max_vertices: int = 6):
    """Seeded random trees with 1..max_vertices vertices."""
    return [random_negdef_graph(seed, 1 + seed % max_vertices) for seed in range(count)]


@pytest.fixture(scope="session")
def random_corpus():
    return corpus()


def pytest_terminal_summary(terminalreporter):
    lines = [
        value
        for key in ("passed", "failed")
        for rep in terminalreporter.stats.get(key, [])
        if rep.when == "call"
        for name, value in rep.user_properties
        if name == "acceptance"
    ]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
