"""Minimal LP-file feasibility solver backed by HiGHS.

Usage: ``python -m putwin.highs_solver model.lp``; prints ``Status: <status>``.
Set ``PUTWIN_ILP_SOLVER="python -m putwin.highs_solver"`` to use it.
"""
import sys


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print("usage: python -m putwin.highs_solver MODEL.lp", file=sys.stderr)
        return 2
    import highspy

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    if h.readModel(argv[0]) != highspy.HighsStatus.kOk:
        print(f"could not read {argv[0]}", file=sys.stderr)
        return 1
    h.run()
    status = h.getModelStatus()
    if status == highspy.HighsModelStatus.kOptimal:
        print("Status: Optimal")
    elif status == highspy.HighsModelStatus.kInfeasible:
        print("Status: Infeasible")
    else:
        print(f"Status: {h.modelStatusToString(status)}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
