#!/usr/bin/env python3
"""Long-running MILP solve worker bound to the HiGHS solver via scipy.

Protocol (line-oriented on stdin/stdout):
  PING                     -> PONG
  SOLVE <req> <resp>       -> DONE <resp>   (or FAIL <reason>)
  QUIT                     -> exits

Request JSON fields: num_vars, obj, lb, ub, integrality (0/1 per var),
a_rows/a_cols/a_vals (COO triplets), row_lb, row_ub, gap, time_limit.
Bounds with |value| >= 1e29 are treated as infinite.

Response JSON fields: status (scipy milp code), objective, x, gap,
wall, message.
"""
import json
import sys
import time

import numpy as np
import scipy.sparse as sp
from scipy.optimize import Bounds, LinearConstraint, milp

BIG = 1e29


def _definitize(a):
    a = np.asarray(a, dtype=float)
    a[a >= BIG] = np.inf
    a[a <= -BIG] = -np.inf
    return a


def handle(req):
    n = int(req["num_vars"])
    c = np.asarray(req["obj"], dtype=float)
    lb = _definitize(req["lb"])
    ub = _definitize(req["ub"])
    integrality = np.asarray(req["integrality"], dtype=np.uint8)
    rlb = _definitize(req["row_lb"])
    rub = _definitize(req["row_ub"])
    m = len(rlb)
    A = sp.csr_matrix(
        (
            np.asarray(req["a_vals"], dtype=float),
            (
                np.asarray(req["a_rows"], dtype=np.int64),
                np.asarray(req["a_cols"], dtype=np.int64),
            ),
        ),
        shape=(m, n),
    )
    options = {"presolve": True}
    if req.get("gap") is not None:
        options["mip_rel_gap"] = float(req["gap"])
    if req.get("time_limit") is not None:
        options["time_limit"] = float(req["time_limit"])

    t0 = time.perf_counter()
    constraints = [LinearConstraint(A, rlb, rub)] if m else []
    res = milp(
        c=c,
        constraints=constraints,
        integrality=integrality,
        bounds=Bounds(lb, ub),
        options=options,
    )
    wall = time.perf_counter() - t0

    out = {"status": int(res.status), "message": str(res.message), "wall": wall}
    if res.x is not None:
        out["x"] = [float(v) for v in res.x]
        out["objective"] = float(res.fun)
    gap = getattr(res, "mip_gap", None)
    out["gap"] = float(gap) if gap is not None and np.isfinite(gap) else 0.0
    return out


def main():
    for line in sys.stdin:
        parts = line.strip().split()
        if not parts:
            continue
        if parts[0] == "QUIT":
            break
        if parts[0] == "PING":
            print("PONG", flush=True)
            continue
        if parts[0] == "SOLVE" and len(parts) == 3:
            try:
                with open(parts[1]) as f:
                    req = json.load(f)
                out = handle(req)
                with open(parts[2], "w") as f:
                    json.dump(out, f)
                print("DONE " + parts[2], flush=True)
            except Exception as exc:  # report, keep serving
                print("FAIL " + repr(exc).replace("\n", " "), flush=True)
            continue
        print("FAIL unknown command", flush=True)


if __name__ == "__main__":
    main()
