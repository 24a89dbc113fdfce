import pytest

# criterion id -> list of (ok, detail); filled by the acceptance tests
_CRITERIA: dict[str, list[tuple[bool, str]]] = {}


@pytest.fixture
def criterion():
    """Record the outcome of one acceptance check before asserting on it."""

    def record(cid: str, ok: bool, detail: str) -> bool:
        _CRITERIA.setdefault(cid, []).append((bool(ok), detail))
        return bool(ok)

    return record


def _order(cid: str):
    head = cid.split()[0]
    return (int(head) if head.isdigit() else 99, cid)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for cid in sorted(_CRITERIA, key=_order):
        parts = _CRITERIA[cid]
        ok = all(p for p, _ in parts)
        detail = "; ".join(d for _, d in parts)
        tr.write_line(f"criterion {cid}: {'PASS' if ok else 'FAIL'} ({detail})")
