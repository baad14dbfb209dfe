"""Regenerate the frozen LP model files used by the format-fidelity tests.

Run after an intentional change to the ILP encoding, then review the diff:

    python3 scripts/freeze_goldens.py
"""
import sys
from pathlib import Path

TESTS = Path(__file__).resolve().parent.parent / "tests"
sys.path.insert(0, str(TESTS))

from golden_models import golden_models  # noqa: E402
from putwin.ilp import serialize_model  # noqa: E402


def main():
    out = TESTS / "golden"
    out.mkdir(exist_ok=True)
    for name, model in golden_models():
        (out / name).write_text(serialize_model(model))
        print(out / name)


if __name__ == "__main__":
    main()
