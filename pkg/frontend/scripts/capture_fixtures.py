"""Capture live service payloads as TypeScript fixtures for the UI tests.

Drives a real in-process service through a short session (selections,
an undo-cell click, a sentence commit, a flagged misrecognition and an
undo-endpoint call) and freezes every response verbatim, so the UI test
doubles serve byte-identical wire payloads instead of hand-written
approximations.

Run from the repository root with the package installed:

    python3 frontend/scripts/capture_fixtures.py
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi.testclient import TestClient

from polyspell.service import create_app

OUT = Path(__file__).resolve().parent.parent / "tests" / "canned.ts"

PHRASEBOOK = ["ok_go.", "ok_go.", "go_on."]
PPD_S = 0.2  # short prediction display keeps real-timer UI tests quick


def find_cell(matrix: dict, **want) -> tuple[int, int]:
    for i, cell in enumerate(matrix["cells"]):
        if cell is None:
            continue
        if all(cell.get(key) == value for key, value in want.items()):
            return divmod(i, matrix["cols"])
    raise KeyError(f"no cell matching {want}")


def main() -> None:
    client = TestClient(create_app())
    client.post("/kbs", json={"name": "okgo", "text": "\n".join(PHRASEBOOK)})
    client.post("/kbs", json={"name": "void", "text": ""})

    initial = client.post(
        "/sessions", json={"kb": "okgo", "ppd_s": PPD_S}
    ).json()
    empty_kb = client.post(
        "/sessions", json={"kb": "void", "ppd_s": PPD_S}
    ).json()

    steps: list[dict] = []
    state = initial

    def apply(op: str, name: str, correct: bool = True, **want) -> None:
        nonlocal state
        nonce = f"cap-{len(steps)}"
        if op == "select":
            row, col = find_cell(state["matrix"], **want)
            response = client.post(
                f"/sessions/{initial['id']}/selections",
                json={"row": row, "col": col, "correct": correct, "nonce": nonce},
            )
        else:
            row = col = None
            response = client.post(
                f"/sessions/{initial['id']}/undo",
                json={"correct": correct, "nonce": nonce},
            )
        assert response.status_code == 200, response.text
        metrics = client.get(f"/sessions/{initial['id']}/metrics")
        assert metrics.status_code == 200, metrics.text
        state = response.json()
        steps.append(
            {
                "op": op,
                "name": name,
                "row": row,
                "col": col,
                "correct": correct,
                "response": state,
                "metrics": metrics.json(),
            }
        )

    apply("select", "char-o", kind="character", label="o")
    apply("select", "pred-ok", kind="prediction", word="ok")
    apply("select", "undo-cell", kind="mandatory", label="undo")
    apply("select", "pred-ok-again", kind="prediction", word="ok")
    apply("select", "char-g", kind="character", label="g")
    apply("select", "terminator", kind="mandatory", label=".")
    apply("select", "char-o-flagged", correct=False, kind="character", label="o")
    apply("undo", "undo-endpoint")

    payload = {"initial": initial, "emptyKb": empty_kb, "steps": steps}
    OUT.write_text(
        "// Live service payloads captured by scripts/capture_fixtures.py —\n"
        "// regenerate with that script instead of editing by hand.\n"
        "export const CANNED = "
        + json.dumps(payload, indent=2)
        + ";\n"
    )
    print(f"wrote {OUT} ({len(steps)} steps)")


if __name__ == "__main__":
    main()
