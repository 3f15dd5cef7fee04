import os
import sys

from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(mod.RESULTS):
        parts = mod.RESULTS[criterion]
        ok = all(p[1] for p in parts)
        failed = [p[0] for p in parts if not p[1]]
        note = "" if ok else f" (failing: {', '.join(failed)})"
        terminalreporter.write_line(f"criterion {criterion}: {'PASS' if ok else 'FAIL'}{note}")
