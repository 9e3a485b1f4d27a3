import mpmath
import pytest

_ACCEPTANCE = {}


@pytest.fixture
def acceptance():
    """Record a named acceptance outcome; the summary prints one line per criterion."""

    def record(number: int, ok: bool, detail: str = ""):
        _ACCEPTANCE[number] = (bool(ok), detail)
        print(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'} {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def catalog_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("catalog")


@pytest.fixture(autouse=True)
def high_precision():
    """Test-side arithmetic on library results runs well above the 256-bit default."""
    with mpmath.workprec(384):
        yield


@pytest.fixture(scope="session")
def v7():
    """enumerate_vn(7) run once without a cache, with its wall time."""
    import time

    from lfrmaps.enumerate import enumerate_vn

    start = time.perf_counter()
    cs = enumerate_vn(7, cache_dir="")
    return cs, time.perf_counter() - start
