"""Minimal PDF text extraction.

Parses a PDF's object graph directly from the byte stream (no xref table
needed), walks the page tree, decodes content streams, and reads the text
shown by Tj/TJ/'/" operators. Runs are ordered top-to-bottom then
left-to-right using the text-positioning operators, which reconstructs the
reading order for linearly typeset documents. Covers Flate, ASCII85, and
ASCIIHex stream filters and compressed object streams; font-level encoding
recovery (CID maps, subset fonts) is out of scope.
"""

from __future__ import annotations

import base64
import re
import zlib

from .errors import MalformedDocument

_OBJ_HEAD = re.compile(rb"(\d+)\s+(\d+)\s+obj\b")
_WHITESPACE = b"\x00\t\n\x0c\r "
_DELIMITERS = b"()<>[]{}/%"


class _Ref:
    __slots__ = ("num", "gen")

    def __init__(self, num: int, gen: int):
        self.num = num
        self.gen = gen

    def __repr__(self) -> str:
        return f"_Ref({self.num}, {self.gen})"


class _Stream:
    __slots__ = ("dictionary", "raw")

    def __init__(self, dictionary: dict, raw: bytes):
        self.dictionary = dictionary
        self.raw = raw


class _Parser:
    """Recursive-descent parser for PDF object syntax."""

    def __init__(self, data: bytes, pos: int = 0):
        self.data = data
        self.pos = pos

    def _skip_ws(self) -> None:
        data, n = self.data, len(self.data)
        while self.pos < n:
            ch = data[self.pos : self.pos + 1]
            if ch in (b"\x00", b"\t", b"\n", b"\x0c", b"\r", b" "):
                self.pos += 1
            elif ch == b"%":  # comment to end of line
                eol = data.find(b"\n", self.pos)
                self.pos = n if eol == -1 else eol + 1
            else:
                return

    def _peek(self, count: int = 1) -> bytes:
        return self.data[self.pos : self.pos + count]

    def parse(self):
        self._skip_ws()
        head = self._peek(2)
        if head == b"<<":
            return self._parse_dict()
        if head[:1] == b"<":
            return self._parse_hex_string()
        if head[:1] == b"(":
            return self._parse_literal_string()
        if head[:1] == b"[":
            return self._parse_array()
        if head[:1] == b"/":
            return self._parse_name()
        return self._parse_keyword_or_number()

    def _parse_dict(self) -> dict:
        self.pos += 2
        out: dict = {}
        while True:
            self._skip_ws()
            if self._peek(2) == b">>":
                self.pos += 2
                return out
            if not self._peek():
                raise MalformedDocument("unterminated dictionary")
            key = self._parse_name()
            out[key] = self.parse()

    def _parse_array(self) -> list:
        self.pos += 1
        out = []
        while True:
            self._skip_ws()
            if self._peek() == b"]":
                self.pos += 1
                return out
            if not self._peek():
                raise MalformedDocument("unterminated array")
            out.append(self.parse())

    def _parse_name(self) -> str:
        if self._peek() != b"/":
            raise MalformedDocument("expected name")
        self.pos += 1
        start = self.pos
        data = self.data
        while self.pos < len(data):
            ch = data[self.pos]
            if ch in _WHITESPACE or ch in _DELIMITERS:
                break
            self.pos += 1
        raw = data[start : self.pos]
        # #xx hex escapes inside names
        def _unhex(match: re.Match) -> bytes:
            return bytes([int(match.group(1), 16)])
        raw = re.sub(rb"#([0-9A-Fa-f]{2})", _unhex, raw)
        return raw.decode("latin-1")

    def _parse_literal_string(self) -> bytes:
        self.pos += 1
        out = bytearray()
        depth = 1
        data, n = self.data, len(self.data)
        while self.pos < n:
            ch = data[self.pos]
            if ch == 0x5C:  # backslash
                self.pos += 1
                if self.pos >= n:
                    break
                esc = data[self.pos]
                if esc in b"nrtbf":
                    out += {0x6E: b"\n", 0x72: b"\r", 0x74: b"\t", 0x62: b"\b", 0x66: b"\f"}[esc]
                    self.pos += 1
                elif esc in b"01234567":
                    digits = bytearray()
                    while self.pos < n and len(digits) < 3 and data[self.pos] in b"01234567":
                        digits.append(data[self.pos])
                        self.pos += 1
                    out.append(int(digits.decode(), 8) & 0xFF)
                elif esc in b"\r\n":  # line continuation
                    self.pos += 1
                    if esc == 0x0D and self.pos < n and data[self.pos] == 0x0A:
                        self.pos += 1
                else:
                    out.append(esc)
                    self.pos += 1
            elif ch == 0x28:  # (
                depth += 1
                out.append(ch)
                self.pos += 1
            elif ch == 0x29:  # )
                depth -= 1
                self.pos += 1
                if depth == 0:
                    return bytes(out)
                out.append(ch)
            else:
                out.append(ch)
                self.pos += 1
        raise MalformedDocument("unterminated string")

    def _parse_hex_string(self) -> bytes:
        self.pos += 1
        end = self.data.find(b">", self.pos)
        if end == -1:
            raise MalformedDocument("unterminated hex string")
        hexdigits = re.sub(rb"[^0-9A-Fa-f]", b"", self.data[self.pos : end])
        self.pos = end + 1
        if len(hexdigits) % 2:
            hexdigits += b"0"
        return bytes.fromhex(hexdigits.decode("ascii"))

    def _parse_keyword_or_number(self):
        self._skip_ws()
        start = self.pos
        data = self.data
        n = len(data)
        while self.pos < n and data[self.pos] not in _WHITESPACE and data[self.pos] not in _DELIMITERS:
            self.pos += 1
        token = data[start : self.pos]
        if not token:
            raise MalformedDocument("unexpected end of object data")
        if token == b"true":
            return True
        if token == b"false":
            return False
        if token == b"null":
            return None
        try:
            if re.fullmatch(rb"[+-]?\d+", token):
                value = int(token)
                # Possible indirect reference "num gen R"
                save = self.pos
                self._skip_ws()
                m = re.match(rb"(\d+)\s+R(?![A-Za-z0-9])", self.data[self.pos : self.pos + 32])
                if value >= 0 and m:
                    self.pos += m.end()
                    return _Ref(value, int(m.group(1)))
                self.pos = save
                return value
            return float(token)
        except ValueError as exc:
            raise MalformedDocument(f"bad token {token!r}") from exc


def _apply_filters(stream: _Stream, resolve) -> bytes:
    data = stream.raw
    filters = resolve(stream.dictionary.get("Filter"))
    if filters is None:
        filters = []
    elif isinstance(filters, str):
        filters = [filters]
    for name in filters:
        name = resolve(name)
        if name in ("FlateDecode", "Fl"):
            data = zlib.decompress(data)
        elif name in ("ASCII85Decode", "A85"):
            body = bytes(data).strip()
            if body.startswith(b"<~"):
                body = body[2:]
            if body.endswith(b"~>"):
                body = body[:-2]
            data = base64.a85decode(re.sub(rb"\s", b"", body))
        elif name in ("ASCIIHexDecode", "AHx"):
            hexpart = bytes(data).split(b">")[0]
            hexdigits = re.sub(rb"[^0-9A-Fa-f]", b"", hexpart)
            if len(hexdigits) % 2:
                hexdigits += b"0"
            data = bytes.fromhex(hexdigits.decode("ascii"))
        else:
            raise MalformedDocument(f"unsupported stream filter: {name}")
    params = resolve(stream.dictionary.get("DecodeParms"))
    if params:
        params = params if isinstance(params, list) else [params]
        for parm in params:
            parm = resolve(parm) or {}
            predictor = resolve(parm.get("Predictor", 1)) or 1
            if predictor and predictor >= 10:
                columns = int(resolve(parm.get("Columns", 1)) or 1)
                colors = int(resolve(parm.get("Colors", 1)) or 1)
                bpc = int(resolve(parm.get("BitsPerComponent", 8)) or 8)
                data = _png_unpredict(data, columns * colors * bpc // 8)
    return data


def _png_unpredict(data: bytes, row_bytes: int) -> bytes:
    stride = row_bytes + 1
    out = bytearray()
    prev = bytearray(row_bytes)
    for at in range(0, len(data) - stride + 1, stride):
        tag = data[at]
        row = bytearray(data[at + 1 : at + stride])
        if tag == 1:
            for i in range(1, row_bytes):
                row[i] = (row[i] + row[i - 1]) & 0xFF
        elif tag == 2:
            for i in range(row_bytes):
                row[i] = (row[i] + prev[i]) & 0xFF
        elif tag == 3:
            for i in range(row_bytes):
                left = row[i - 1] if i else 0
                row[i] = (row[i] + (left + prev[i]) // 2) & 0xFF
        elif tag == 4:
            for i in range(row_bytes):
                left = row[i - 1] if i else 0
                upleft = prev[i - 1] if i else 0
                row[i] = (row[i] + _paeth(left, prev[i], upleft)) & 0xFF
        out += row
        prev = row
    return bytes(out)


def _paeth(a: int, b: int, c: int) -> int:
    p = a + b - c
    pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
    if pa <= pb and pa <= pc:
        return a
    return b if pb <= pc else c


class _Document:
    def __init__(self, data: bytes):
        self.data = data
        self.objects: dict[int, object] = {}
        self._scan_objects()
        self._expand_object_streams()

    def resolve(self, value, _depth: int = 0):
        while isinstance(value, _Ref):
            if _depth > 32:
                raise MalformedDocument("reference cycle")
            value = self.objects.get(value.num)
            _depth += 1
        return value

    def _scan_objects(self) -> None:
        data = self.data
        for match in _OBJ_HEAD.finditer(data):
            # "N G obj" inside a stream body would be noise; a best-effort
            # scan tolerates it because later, valid definitions overwrite.
            num = int(match.group(1))
            parser = _Parser(data, match.end())
            try:
                value = parser.parse()
            except MalformedDocument:
                continue
            parser._skip_ws()
            if isinstance(value, dict) and data[parser.pos : parser.pos + 6] == b"stream":
                start = parser.pos + 6
                if data[start : start + 2] == b"\r\n":
                    start += 2
                elif data[start : start + 1] in (b"\n", b"\r"):
                    start += 1
                length = value.get("Length")
                raw = None
                if isinstance(length, int):
                    end = start + length
                    if data[end : end + 20].lstrip(b"\r\n ").startswith(b"endstream"):
                        raw = data[start:end]
                if raw is None:
                    # Length missing or an indirect ref: find the terminator.
                    end = data.find(b"endstream", start)
                    if end == -1:
                        continue
                    raw = data[start:end].rstrip(b"\r\n")
                value = _Stream(value, raw)
            self.objects[num] = value

    def _expand_object_streams(self) -> None:
        for num in list(self.objects):
            obj = self.objects[num]
            if not isinstance(obj, _Stream):
                continue
            if self.resolve(obj.dictionary.get("Type")) != "ObjStm":
                continue
            try:
                payload = _apply_filters(obj, self.resolve)
                count = int(self.resolve(obj.dictionary.get("N", 0)))
                first = int(self.resolve(obj.dictionary.get("First", 0)))
            except (MalformedDocument, ValueError, zlib.error):
                continue
            header = _Parser(payload[:first])
            pairs = []
            try:
                for _ in range(count):
                    objnum = header.parse()
                    offset = header.parse()
                    pairs.append((int(objnum), int(offset)))
            except (MalformedDocument, TypeError, ValueError):
                continue
            for objnum, offset in pairs:
                if objnum in self.objects and not isinstance(self.objects.get(objnum), _Stream):
                    continue
                try:
                    self.objects[objnum] = _Parser(payload, first + offset).parse()
                except MalformedDocument:
                    continue

    def catalog(self) -> dict:
        candidates: list[_Ref] = []
        for match in re.finditer(rb"trailer", self.data):
            parser = _Parser(self.data, match.end())
            try:
                trailer = parser.parse()
            except MalformedDocument:
                continue
            if isinstance(trailer, dict) and isinstance(trailer.get("Root"), _Ref):
                candidates.append(trailer["Root"])
        for obj in self.objects.values():
            if isinstance(obj, _Stream) and self.resolve(obj.dictionary.get("Type")) == "XRef":
                root = obj.dictionary.get("Root")
                if isinstance(root, _Ref):
                    candidates.append(root)
        for ref in reversed(candidates):
            root = self.resolve(ref)
            if isinstance(root, dict) and self.resolve(root.get("Type")) == "Catalog":
                return root
        for obj in self.objects.values():
            value = obj.dictionary if isinstance(obj, _Stream) else obj
            if isinstance(value, dict) and self.resolve(value.get("Type")) == "Catalog":
                return value
        raise MalformedDocument("no document catalog found")

    def pages(self) -> list[dict]:
        ordered: list[dict] = []
        seen: set[int] = set()

        def walk(node_ref) -> None:
            node = self.resolve(node_ref)
            if not isinstance(node, dict) or id(node) in seen:
                return
            seen.add(id(node))
            node_type = self.resolve(node.get("Type"))
            if node_type == "Page":
                ordered.append(node)
                return
            for kid in self.resolve(node.get("Kids")) or []:
                walk(kid)

        try:
            walk(self.catalog().get("Pages"))
        except MalformedDocument:
            ordered = []
        if not ordered:
            for obj in self.objects.values():
                if isinstance(obj, dict) and self.resolve(obj.get("Type")) == "Page":
                    ordered.append(obj)
        if not ordered:
            raise MalformedDocument("no pages found")
        return ordered

    def page_content(self, page: dict) -> bytes:
        contents = self.resolve(page.get("Contents"))
        streams = contents if isinstance(contents, list) else [contents]
        parts = []
        for item in streams:
            item = self.resolve(item)
            if isinstance(item, _Stream):
                try:
                    parts.append(_apply_filters(item, self.resolve))
                except (MalformedDocument, zlib.error, ValueError):
                    continue
        return b"\n".join(parts)


def _decode_pdf_text(raw: bytes) -> str:
    if raw[:2] == b"\xfe\xff":
        return raw[2:].decode("utf-16-be", errors="replace")
    return raw.decode("latin-1")


def _extract_runs(content: bytes) -> list[tuple[float, float, str]]:
    """(y, x, text) runs shown by the content stream's text operators."""
    parser = _Parser(content)
    stack: list[object] = []
    runs: list[tuple[float, float, str]] = []
    x = y = 0.0
    line_x = line_y = 0.0
    leading = 12.0

    def _num(value) -> float:
        return float(value) if isinstance(value, (int, float)) else 0.0

    def newline() -> None:
        nonlocal x, y, line_x, line_y
        line_y -= leading
        x, y = line_x, line_y

    def show(value) -> None:
        if isinstance(value, bytes):
            text = _decode_pdf_text(value)
            if text:
                runs.append((y, x, text))

    n = len(content)
    while True:
        parser._skip_ws()
        if parser.pos >= n:
            break
        ch = content[parser.pos : parser.pos + 1]
        if ch in b"(<[/" or ch.isdigit() or ch in b"+-.":
            try:
                stack.append(parser.parse())
            except MalformedDocument:
                break
            continue
        start = parser.pos
        while parser.pos < n and content[parser.pos] not in _WHITESPACE and content[parser.pos] not in _DELIMITERS:
            parser.pos += 1
        if parser.pos == start:
            parser.pos += 1
            continue
        op = content[start : parser.pos]
        if op == b"BT":
            x = y = line_x = line_y = 0.0
        elif op == b"Tm" and len(stack) >= 6:
            line_x, line_y = _num(stack[-2]), _num(stack[-1])
            x, y = line_x, line_y
        elif op in (b"Td", b"TD") and len(stack) >= 2:
            if op == b"TD":
                leading = -_num(stack[-1]) or leading
            line_x += _num(stack[-2])
            line_y += _num(stack[-1])
            x, y = line_x, line_y
        elif op == b"TL" and stack:
            leading = _num(stack[-1]) or leading
        elif op == b"T*":
            newline()
        elif op == b"Tj" and stack:
            show(stack[-1])
        elif op == b"'" and stack:
            newline()
            show(stack[-1])
        elif op == b'"' and len(stack) >= 3:
            newline()
            show(stack[-1])
        elif op == b"TJ" and stack and isinstance(stack[-1], list):
            pieces = [_decode_pdf_text(el) for el in stack[-1] if isinstance(el, bytes)]
            if any(pieces):
                runs.append((y, x, "".join(pieces)))
        stack.clear()
    return runs


def _runs_to_text(runs: list[tuple[float, float, str]]) -> str:
    if not runs:
        return ""
    ordered = sorted(runs, key=lambda r: (-round(r[0], 1), round(r[1], 1)))
    lines: list[list[str]] = []
    current_y: float | None = None
    for run_y, _, text in ordered:
        if current_y is None or abs(run_y - current_y) > 0.5:
            lines.append([text])
            current_y = run_y
        else:
            lines[-1].append(text)
    return "\n".join(" ".join(parts) for parts in lines)


def extract_page_texts(pdf_bytes: bytes) -> list[str]:
    """Per-page text of a PDF, reading order restored, one string per page.

    Raises MalformedDocument when the bytes are not a parseable PDF.
    """
    if not pdf_bytes:
        raise MalformedDocument("empty input")
    if b"%PDF-" not in pdf_bytes[:1024]:
        raise MalformedDocument("missing PDF header")
    doc = _Document(pdf_bytes)
    texts = []
    for page in doc.pages():
        content = doc.page_content(page)
        texts.append(_runs_to_text(_extract_runs(content)))
    return texts
