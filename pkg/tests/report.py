"""Collects the one-line acceptance verdicts printed at the end of a run."""

LINES = []


def emit(number, ok, detail):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    LINES.append(line)
    print(line)
    return ok
