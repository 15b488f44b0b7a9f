import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture]
)
settings.register_profile("ci", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(autouse=True)
def isolated_env(monkeypatch, tmp_path):
    """Keep CATZX_* settings and env files from the developer's shell out of the tests."""
    for key in list(os.environ):
        if key.startswith("CATZX_"):
            monkeypatch.delenv(key, raising=False)
    monkeypatch.chdir(tmp_path)


@pytest.fixture
def qasm_file(tmp_path):
    def write(text: str, name: str = "circuit.qasm") -> str:
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return write


@pytest.fixture(autouse=True)
def reduced_form_checked(monkeypatch):
    """Every simplification reached through the package must leave a reduced diagram behind."""
    import catzx
    import catzx.driver
    import catzx.simplify

    original = catzx.simplify.full_simplify

    def checked(d, *args, **kwargs):
        out = original(d, *args, **kwargs)
        if not out.scalar.is_zero:
            problems = catzx.simplify.check_reduced(out)
            assert problems == [], f"full_simplify left a non-reduced diagram: {problems}"
        return out

    for module in (catzx, catzx.driver, catzx.simplify):
        monkeypatch.setattr(module, "full_simplify", checked)
