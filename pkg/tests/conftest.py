from __future__ import annotations

ACCEPTANCE: dict[int, tuple[bool, str]] = {}
ACCEPTANCE_SECONDS: dict[int, float] = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
    if ACCEPTANCE_SECONDS:
        terminalreporter.write_line(f"total {sum(ACCEPTANCE_SECONDS.values()):.1f}s (< 120 s)")
