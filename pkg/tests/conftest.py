import pytest


@pytest.fixture
def criterion_line(request):
    """Writer that reaches the terminal through pytest's own reporter, so
    acceptance pass/fail lines stay visible under output capturing."""
    reporter = request.config.pluginmanager.get_plugin("terminalreporter")

    def emit(text: str):
        if reporter is not None:
            reporter.write_line(text)

    return emit
