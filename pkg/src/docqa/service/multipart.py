"""multipart/form-data parsing built on the standard library email parser,
so file uploads need no extra dependency."""

from __future__ import annotations

import email.parser
import email.policy
from dataclasses import dataclass

from ..errors import FormatError


@dataclass
class FormPart:
    name: str
    filename: str | None
    data: bytes


def parse_multipart(content_type: str, body: bytes) -> list[FormPart]:
    """Split a multipart/form-data body into its parts.

    Raises FormatError when the content type is not multipart or the body
    does not parse.
    """
    if "multipart" not in content_type.lower():
        raise FormatError(f"not a multipart content type: {content_type!r}")
    head = (
        f"Content-Type: {content_type}\r\nMIME-Version: 1.0\r\n\r\n".encode("latin-1")
    )
    message = email.parser.BytesParser(policy=email.policy.HTTP).parsebytes(head + body)
    if not message.is_multipart():
        raise FormatError("multipart body failed to parse")
    parts = []
    for part in message.iter_parts():
        name = part.get_param("name", header="content-disposition") or ""
        payload = part.get_payload(decode=True)
        if payload is None:
            payload = b""
        parts.append(FormPart(name=str(name), filename=part.get_filename(), data=payload))
    return parts
