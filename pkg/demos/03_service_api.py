"""Walk the HTTP API in-process: upload, converse, inspect the trace.

Uses the ASGI app directly through the test client, so nothing listens on a
network port. The same requests work against `engine serve`.

    python3 demos/03_service_api.py
"""

from __future__ import annotations

import json
import tempfile

from fastapi.testclient import TestClient

from docqa import Engine, load_config
from docqa.gateway.stubs import ScriptedGenerator
from docqa.service import create_app

DOCUMENT = (
    "Harbor dredging happens every third spring. "
    "The channel depth target is nine meters. "
    "Dredge spoils move to the reclamation site."
)

RULES = [
    ("volcano", "not enough context"),
    ("channel", "Per [1], 'The channel depth target is nine meters.'"),
]


def show(label: str, payload: dict) -> None:
    print(f"--- {label}")
    print(json.dumps(payload, indent=2)[:600])
    print()


def main() -> None:
    with tempfile.TemporaryDirectory() as workdir:
        config = load_config(None, {"data_dir": workdir})
        engine = Engine(config, generator=ScriptedGenerator(rules=RULES))
        client = TestClient(create_app(engine))

        show("GET /api/health", client.get("/api/health").json())

        upload = client.post(
            "/api/documents", json={"name": "harbor.txt", "text": DOCUMENT}
        ).json()
        show("POST /api/documents", upload)

        conversation = client.post("/api/conversations").json()["conversation_id"]
        answer = client.post(
            f"/api/conversations/{conversation}/query",
            json={"question": "how deep is the channel target?", "debug": True},
        ).json()
        show("POST .../query (debug)", {k: v for k, v in answer.items() if k != "trace"})
        print("trace rewordings:", answer["trace"]["rewordings"])
        print("trace list origins:", [entry["origin"] for entry in answer["trace"]["lists"]])
        print()

        refusal = client.post(
            f"/api/conversations/{conversation}/query",
            json={"question": "describe the volcano hazard plan"},
        ).json()
        show("POST .../query (refusal)", refusal)

        show("GET /api/conversations/{id}", client.get(f"/api/conversations/{conversation}").json())


if __name__ == "__main__":
    main()
