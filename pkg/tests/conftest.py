from hypothesis import settings

settings.register_profile("ci", derandomize=True, deadline=None)
settings.register_profile("explore", deadline=None, max_examples=2000)
settings.load_profile("ci")


_acceptance = []


def pytest_runtest_logreport(report):
    if report.when == "call":
        _acceptance.extend(v for k, v in report.user_properties if k == "acceptance")


def pytest_terminal_summary(terminalreporter):
    if _acceptance:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_acceptance, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
