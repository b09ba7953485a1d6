import os

import numpy as np
import pytest

from streamlang.formats import WavSpec, write_wav
from streamlang.frame import EngineConfig

RATE = 44100


@pytest.fixture
def cfg():
    return EngineConfig()


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    """Run in a fresh directory so scripts can use relative paths."""
    monkeypatch.chdir(tmp_path)
    return tmp_path


def make_wav(path, data, rate=RATE):
    """``data`` has shape (channels, n)."""
    data = np.asarray(data, dtype=np.float32)
    write_wav(str(path), WavSpec(data.shape[0], rate), data)
    return str(path)


def constant_tracks(directory, values, seconds, channels=1, name="track"):
    """Write one constant-amplitude WAV per value and a listing; returns the listing path."""
    paths = []
    for i, v in enumerate(values):
        p = os.path.join(directory, f"{name}{i}.wav")
        make_wav(p, np.full((channels, round(seconds * RATE)), v))
        paths.append(os.path.basename(p))
    listing = os.path.join(directory, f"{name}s.txt")
    with open(listing, "w") as f:
        f.write("\n".join(paths) + "\n")
    return listing


@pytest.fixture
def wav_factory():
    return make_wav


@pytest.fixture
def tracks_factory():
    return constant_tracks


# acceptance criteria: one PASS/FAIL line each at the end of the run

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): an acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    if report.when == "call" or (report.when == "setup" and report.failed):
        _CRITERIA[number] = ("PASS" if report.passed else "FAIL", title)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        status, title = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {title}")
