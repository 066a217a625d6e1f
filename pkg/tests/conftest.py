import pytest

_criteria = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark and mark.args:
            _criteria[item.nodeid] = (mark.args[0], mark.args[1] if len(mark.args) > 1 else item.name)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if item.nodeid in _criteria and (rep.when == "call" or rep.failed):
        label, title = _criteria[item.nodeid]
        prev = item.config.stash.get(_results_key, {})
        if prev.get(label) != "FAIL":
            prev[label] = "PASS" if rep.passed else "FAIL"
        prev.setdefault(("title", label), title)
        item.config.stash[_results_key] = prev


_results_key = pytest.StashKey[dict]()


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_results_key, {})
    labels = sorted((k for k in results if isinstance(k, str)), key=lambda s: int(s[2:]))
    if not labels:
        return
    terminalreporter.section("acceptance criteria")
    for label in labels:
        terminalreporter.write_line(f"{label:<5} {results[label]}  {results[('title', label)]}")
