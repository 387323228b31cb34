CRITERIA = {
    1: "full table for k=1, j=3",
    2: "split-bundle law charge = n^2 k for nk <= 8",
    3: "grafting losses 24, 12 and 1",
    4: "charge bounds conformance, k <= 3, j <= 4",
    5: "minimal instanton charge k-1 for k = 2, 3",
    6: "closed forms on Z_1 for j <= 5",
    7: "invariants unchanged with caps grown by 2",
    8: "BPST anti-self-duality, symbolic and 100 points",
    9: "property suite",
}


def _criterion(nodeid):
    name = nodeid.rsplit("::", 1)[-1]
    if "test_acceptance.py" in nodeid and name.startswith("test_criterion_"):
        return int(name.split("_")[2])
    return None


def pytest_terminal_summary(terminalreporter):
    outcome = {}
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            n = _criterion(getattr(rep, "nodeid", ""))
            if n is None:
                continue
            if status != "passed":
                outcome[n] = "FAIL"
            elif rep.when == "call":
                outcome.setdefault(n, "PASS")
    if not outcome:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        if n in outcome:
            terminalreporter.write_line(f"{outcome[n]} criterion {n}: {CRITERIA[n]}")
