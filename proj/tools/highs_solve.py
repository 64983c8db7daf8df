#!/usr/bin/env python3
# SPDX-FileCopyrightText: Copyright (c) 2026 The multirelax Authors
# SPDX-License-Identifier: Apache-2.0
"""Solver command for the external adapter, backed by HiGHS (pip install highspy).

    MULTIRELAX_SOLVER_CMD='python3 tools/highs_solve.py {lp_in} {sol_out} {time_limit}'
"""
import sys

import highspy


def main() -> int:
    if len(sys.argv) not in (3, 4):
        print("usage: highs_solve.py LP_IN SOL_OUT [TIME_LIMIT]", file=sys.stderr)
        return 2
    lp_in, sol_out = sys.argv[1], sys.argv[2]
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", 1e-6)
    # Absolute tolerances: rows with 1e11 coefficients leave residuals near 1e-6 that HiGHS
    # otherwise rejects. The adapter re-checks the point with scale-aware tolerances.
    h.setOptionValue("mip_feasibility_tolerance", 1e-5)
    h.setOptionValue("primal_feasibility_tolerance", 1e-5)
    if len(sys.argv) == 4:
        h.setOptionValue("time_limit", float(sys.argv[3]))
    if h.readModel(lp_in) != highspy.HighsStatus.kOk:
        print(f"cannot read {lp_in}", file=sys.stderr)
        return 1
    h.run()
    status = h.getModelStatus()
    if status != highspy.HighsModelStatus.kOptimal:
        print(f"HiGHS finished with {h.modelStatusToString(status)}", file=sys.stderr)
        return 1
    names = h.getLp().col_names_
    values = h.getSolution().col_value
    with open(sol_out, "w") as out:
        out.write(f"=obj= {h.getInfo().objective_function_value!r}\n")
        for name, value in zip(names, values):
            out.write(f"{name} {value!r}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
