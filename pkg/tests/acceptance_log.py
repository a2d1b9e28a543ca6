"""Shared sink for acceptance PASS/FAIL lines, echoed in the pytest terminal summary."""

LINES: list = []
