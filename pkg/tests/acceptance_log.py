"""Collects one pass/fail line per acceptance criterion."""

import sys

RESULTS = {}


def record(index, title, ok, detail):
    line = f"[acceptance {index:2d}] {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    RESULTS[index] = line
    print(line, file=sys.__stdout__, flush=True)
    return ok
