"""Collects the PASS/FAIL lines of the acceptance suite for the terminal summary."""
LINES = []


def report(criterion, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} [{criterion}] {detail}"
    LINES.append(line)
    print(line)
    return ok
