"""Ingest a small policy document and ask grounded questions.

Runs entirely on the built-in deterministic backends (hashed embeddings,
scripted generation, lexical reranking), so it needs no model server.

    python3 demos/01_ingest_and_ask.py
"""

from __future__ import annotations

import tempfile

from docqa import Engine, load_config
from docqa.gateway.stubs import ScriptedGenerator

POLICY = (
    "The solar credit program started in 2020. "
    "Households get 30 percent back on installation costs. "
    "Applications are filed online before December. "
    "Commercial sites follow a separate depreciation schedule."
)

RULES = [
    ("asteroid", "not enough context"),
    ("solar", "Per [1], 'Households get 30 percent back on installation costs.'"),
]


def main() -> None:
    with tempfile.TemporaryDirectory() as workdir:
        config = load_config(None, {"data_dir": workdir})
        engine = Engine(config, generator=ScriptedGenerator(rules=RULES))

        record, chunk_count = engine.ingest_bytes(POLICY.encode(), "policy.txt")
        print(f"ingested {record.file_name}: {record.page_count} page(s), {chunk_count} chunk(s)")
        print(f"summary: {record.summary}\n")

        conversation = engine.create_conversation()
        for question in [
            "how much of the cost does the solar credit cover?",
            "what does the policy say about asteroid mining?",
        ]:
            answer = engine.answer(conversation, question)
            print(f"Q: {question}")
            print(f"A: {answer.text}")
            if answer.insufficient_context:
                print("   (the retrieved excerpts could not support an answer)")
            for i, citation in enumerate(answer.citations, start=1):
                print(f"   [{i}] {citation.file_name} p.{citation.page_number}: {citation.text[:70]}...")
            print()


if __name__ == "__main__":
    main()
