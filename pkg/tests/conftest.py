import gc

import pytest


@pytest.fixture
def quiet_gc():
    """Pause the cyclic collector for wall-clock-sensitive tests.

    Timing tests assert on request pacing; a garbage-collection pause in
    this shared process would register as arrival jitter and has nothing
    to do with the code under test.
    """
    was_enabled = gc.isenabled()
    gc.collect()
    gc.disable()
    try:
        yield
    finally:
        if was_enabled:
            gc.enable()
