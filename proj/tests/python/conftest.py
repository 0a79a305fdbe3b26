import os
import pathlib
import sys

import pytest

# When run through ctest, PYTHONPATH already points at the staged package
# in the build tree. For bare `pytest` invocations, fall back to an
# installed package.
try:
    import remest  # noqa: F401
except ImportError:  # pragma: no cover
    staged = os.environ.get("REMEST_PYTHON_DIR")
    if staged:
        sys.path.insert(0, staged)
    try:
        import remest  # noqa: F401
    except ImportError:
        pytest.skip(
            "remest extension not built; run via ctest or pip install .",
            allow_module_level=True,
        )


@pytest.fixture(scope="session")
def config_path():
    env = os.environ.get("REMEST_CONFIG")
    if env:
        return env
    return str(
        pathlib.Path(__file__).resolve().parents[2] / "configs" / "table1.json"
    )
