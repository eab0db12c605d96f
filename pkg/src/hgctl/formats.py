"""JSON instance and partition files."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Optional

from .core import AdditiveGame, FriendGame, Game, HgctlError, InvalidGame, Partition


class FormatError(HgctlError):
    def __init__(self, message: str, line: Optional[int] = None, source: str = ""):
        where = source
        if line is not None:
            where = f"{where}:{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)
        self.line = line


def _line_at(text: str, offset: int) -> int:
    return text.count("\n", 0, offset) + 1


class _Located:
    """Finds the line where the t-th element of a top-level list field starts."""

    def __init__(self, text: str):
        self.text = text
        self.dec = json.JSONDecoder()

    def key_line(self, key: str) -> Optional[int]:
        pos = self.text.find(f'"{key}"')
        return _line_at(self.text, pos) if pos >= 0 else None

    def element_lines(self, key: str) -> list[int]:
        text = self.text
        pos = text.find(f'"{key}"')
        if pos < 0:
            return []
        pos = text.find("[", pos)
        if pos < 0:
            return []
        lines = []
        i = pos + 1
        while True:
            while i < len(text) and text[i] in " \t\r\n,":
                i += 1
            if i >= len(text) or text[i] == "]":
                return lines
            lines.append(_line_at(text, i))
            try:
                _, i = self.dec.raw_decode(text, i)
            except json.JSONDecodeError:
                return lines


def _parse_json(text: str, source: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(e.msg, e.lineno, source) from None


def _line(lines: list[int], t: int) -> Optional[int]:
    return lines[t] if t < len(lines) else None


def parse_instance(text: str, source: str = "") -> tuple[Game, dict]:
    """Parse an instance file; returns the game and its metadata dict."""
    doc = _parse_json(text, source)
    loc = _Located(text)
    if not isinstance(doc, dict):
        raise FormatError("instance file must hold a JSON object", 1, source)
    model = doc.get("model")
    if model not in ("additive", "friends"):
        raise FormatError(f"model must be 'additive' or 'friends', got {model!r}",
                          loc.key_line("model"), source)
    agents = doc.get("agents")
    if not isinstance(agents, list) or not agents or not all(isinstance(a, str) for a in agents):
        raise FormatError("agents must be a nonempty list of names", None, source)
    agent_lines = loc.element_lines("agents")
    pos: dict[str, int] = {}
    for t, a in enumerate(agents):
        if a in pos:
            raise FormatError(f"duplicate agent name {a!r}", _line(agent_lines, t), source)
        pos[a] = t

    def names(key: str, default):
        raw = doc.get(key, default)
        if not isinstance(raw, list):
            raise FormatError(f"{key} must be a list of names", None, source)
        lines = loc.element_lines(key)
        out = set()
        for t, a in enumerate(raw):
            if a not in pos:
                raise FormatError(f"{key} lists unknown agent {a!r}", _line(lines, t), source)
            out.add(pos[a])
        return out

    additional = names("additional", [])
    original = names("original", [a for t, a in enumerate(agents) if t not in additional])
    if original & additional:
        raise FormatError("an agent is listed as both original and additional", None, source)
    if original | additional != set(range(len(agents))):
        raise FormatError("every agent must be original or additional", None, source)
    arcs = doc.get("arcs", [])
    if not isinstance(arcs, list):
        raise FormatError("arcs must be a list", None, source)
    arc_lines = loc.element_lines("arcs")
    parsed = []
    seen = set()
    for t, arc in enumerate(arcs):
        ln = _line(arc_lines, t)
        if not isinstance(arc, dict) or "from" not in arc or "to" not in arc:
            raise FormatError("each arc needs 'from' and 'to'", ln, source)
        a, b = arc["from"], arc["to"]
        for end in (a, b):
            if end not in pos:
                raise FormatError(f"arc refers to unknown agent {end!r}", ln, source)
        if a == b:
            raise FormatError(f"self-loop on {a!r}", ln, source)
        if (a, b) in seen:
            raise FormatError(f"duplicate arc {a!r} -> {b!r}", ln, source)
        seen.add((a, b))
        w = arc.get("weight", 1 if model == "friends" else None)
        if isinstance(w, bool) or not isinstance(w, int):
            raise FormatError("weights must be integers", ln, source)
        if model == "additive" and w == 0:
            raise FormatError("additive weights must be nonzero", ln, source)
        if model == "friends" and w != 1:
            raise FormatError("friend arcs carry weight 1", ln, source)
        parsed.append((pos[a], pos[b], w))
    meta = doc.get("metadata", {})
    if not isinstance(meta, dict):
        raise FormatError("metadata must be an object", None, source)
    try:
        if model == "additive":
            game: Game = AdditiveGame.from_arcs(len(agents), parsed, additional, agents)
        else:
            game = FriendGame.from_arcs(len(agents), [(a, b) for a, b, _ in parsed], additional, agents)
    except InvalidGame as e:
        raise FormatError(str(e), None, source) from None
    return game, meta


def dump_instance(game: Game, metadata: Optional[dict] = None) -> str:
    names = game.names
    doc: dict[str, Any] = {
        "model": "additive" if isinstance(game, AdditiveGame) else "friends",
        "agents": list(names),
        "original": [names[a] for a in sorted(game.original)],
        "additional": [names[a] for a in sorted(game.additional)],
    }
    if isinstance(game, AdditiveGame):
        doc["arcs"] = [{"from": names[i], "to": names[j], "weight": w}
                       for (i, j), w in sorted(game.utilities.items())]
    else:
        doc["arcs"] = [{"from": names[i], "to": names[j]} for i, j in game.arcs()]
    if metadata:
        doc["metadata"] = metadata
    lines = ["{"]
    keys = list(doc)
    for t, key in enumerate(keys):
        tail = "," if t < len(keys) - 1 else ""
        val = doc[key]
        if isinstance(val, list) and val and isinstance(val[0], dict):
            lines.append(f'  "{key}": [')
            for s, item in enumerate(val):
                lines.append("    " + json.dumps(item) + ("," if s < len(val) - 1 else ""))
            lines.append("  ]" + tail)
        else:
            lines.append(f'  "{key}": ' + json.dumps(val) + tail)
    lines.append("}")
    return "\n".join(lines) + "\n"


def load_instance(path) -> tuple[Game, dict]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise FormatError(f"cannot read file: {e.strerror}", None, str(path)) from None
    return parse_instance(text, str(path))


def parse_partition(text: str, game: Game, source: str = "") -> Partition:
    doc = _parse_json(text, source)
    if not isinstance(doc, dict) or not isinstance(doc.get("coalitions"), list):
        raise FormatError("partition file needs a 'coalitions' list", 1, source)
    lines = _Located(text).element_lines("coalitions")
    seen: dict[str, int] = {}
    blocks = []
    for t, c in enumerate(doc["coalitions"]):
        ln = _line(lines, t)
        if not isinstance(c, list) or not c:
            raise FormatError("each coalition must be a nonempty list of names", ln, source)
        block = []
        for name in c:
            if name not in game.names:
                raise FormatError(f"unknown agent {name!r}", ln, source)
            if name in seen:
                raise FormatError(f"agent {name!r} appears in two coalitions", ln, source)
            seen[name] = t
            block.append(game.index_of(name))
        blocks.append(block)
    missing = [n for n in game.names if n not in seen]
    if missing:
        raise FormatError(f"partition leaves out {', '.join(missing)}", None, source)
    return Partition(blocks)


def dump_partition(partition: Partition, game: Game) -> str:
    coal = [[game.names[a] for a in b] for b in partition.blocks]
    return json.dumps({"coalitions": coal}, indent=2) + "\n"


def load_partition(path, game: Game) -> Partition:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise FormatError(f"cannot read file: {e.strerror}", None, str(path)) from None
    return parse_partition(text, game, str(path))
