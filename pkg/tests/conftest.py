import numpy as np
import pytest


def simulate_list(arms, mu, tau, rounds, seed=0):
    """Independent Monte-Carlo walk of one list: mean payoff and its standard error.

    Written from the payoff definition only (sense in order, pay tau per
    sense, play the first available arm), without touching the library.
    """
    rng = np.random.default_rng(seed)
    mu = np.asarray(mu, dtype=float)
    pay = np.zeros(rounds)
    done = np.zeros(rounds, dtype=bool)
    for k, arm in enumerate(arms, start=1):
        avail = rng.random(rounds) < mu[arm]
        hit = avail & ~done
        pay[hit] = 1.0 - k * tau
        done |= avail
    return pay.mean(), pay.std(ddof=1) / np.sqrt(rounds)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
