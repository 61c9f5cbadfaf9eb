import os
import shutil

import pytest


@pytest.fixture(scope="session")
def cli():
    path = os.environ.get("FPPC_CLI") or shutil.which("fppc")
    if not path:
        pytest.skip("fppc CLI not found; set FPPC_CLI")
    return path
