import numpy as np
import pytest

from hotqubo.market import write_prices_csv, write_returns_csv
from hotqubo.synthetic import write_dataset

# Engineered 4-asset universe: diagonal covariance, means solved backwards so
# the continuous optimum and the ellipsoid half-widths land on chosen values.
TABLE1_TICKERS = ["MSFT", "AAPL", "NVDA", "AMZN"]
TABLE1_PRICES = np.array([317.0, 171.0, 43.5, 127.2])
TABLE1_XSTAR = np.array([194.5396, 372.5396, 1434.2, 489.5396])
TABLE1_HALFWIDTH = np.array([0.8, 0.8, 2.5, 0.8])
TABLE1_SCALE = 0.31


def _sylvester(size):
    h = np.ones((1, 1))
    while h.shape[0] < size:
        h = np.block([[h, h], [h, -h]])
    return h


def table1_returns(budget=250_000.0, gamma=3.0, kappa_scale=50.0, periods=8, x_star=TABLE1_XSTAR):
    p = TABLE1_PRICES
    n = len(p)
    gamma_t = gamma / budget
    kappa_t = kappa_scale * gamma / budget
    b = TABLE1_SCALE / TABLE1_HALFWIDTH**2
    var = b / ((gamma_t + 2 * kappa_t) * p**2)
    x0 = np.floor((budget / n) / p)
    sigma_t_diag = var * p**2
    mu_f = b * x_star - 2 * kappa_t * sigma_t_diag * x0
    mu = mu_f / p
    signs = _sylvester(periods)[:, 1 : n + 1].astype(float)
    returns = mu + signs * np.sqrt(var * (periods - 1) / periods)
    return returns


@pytest.fixture
def table1_files(tmp_path):
    r, p = tmp_path / "returns.csv", tmp_path / "prices.csv"
    write_returns_csv(r, TABLE1_TICKERS, table1_returns())
    write_prices_csv(p, TABLE1_TICKERS, TABLE1_PRICES)
    return r, p


@pytest.fixture
def integral_files(tmp_path):
    r, p = tmp_path / "returns.csv", tmp_path / "prices.csv"
    write_returns_csv(r, TABLE1_TICKERS, table1_returns(x_star=np.array([190.0, 370.0, 1430.0, 480.0])))
    write_prices_csv(p, TABLE1_TICKERS, TABLE1_PRICES)
    return r, p


@pytest.fixture(scope="session")
def synthetic_100(tmp_path_factory):
    out = tmp_path_factory.mktemp("synthetic100")
    return write_dataset(out, seed=7, n=100, periods=600)


@pytest.fixture(scope="session")
def synthetic_small(tmp_path_factory):
    out = tmp_path_factory.mktemp("synthetic4")
    return write_dataset(out, seed=3, n=4, periods=240)


@pytest.fixture
def table1_model():
    from hotqubo.market import Calibration, from_arrays, initial_portfolio, scale_to_units
    from hotqubo.model import build_with_transaction_costs

    u = from_arrays(TABLE1_TICKERS, TABLE1_PRICES, table1_returns())
    cal = Calibration()
    mu_f, s, g, k = scale_to_units(u, cal)
    return build_with_transaction_costs(mu_f, s, g, k, initial_portfolio(u, cal))


_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        number, title = mark.args
        detail = getattr(item, "criterion_detail", "")
        _CRITERIA[number] = (title, report.outcome, detail, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, outcome, detail, duration = _CRITERIA[number]
        status = "PASS" if outcome == "passed" else "FAIL"
        line = f"[{status}] {number:>2}. {title} ({duration:.1f}s)"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)
