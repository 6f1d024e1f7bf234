"""Scene markup: HTML-like entity trees, component maps, and selectors.

A scene file is an XML-style nested document of entities such as
``<a-entity game-state="type:puzzle; name:puzzle1; room:room1">``.
Nesting is strict: every open tag needs a matching close tag (or a
self-closing ``/>``), and malformed input raises instead of being repaired.

Component attribute values use a small clause grammar::

    key:value; key2:a,b,c; flag

``;`` separates clauses, the first ``:`` splits key from value, ``,`` splits
string lists, ``true``/``false`` become booleans, numeric literals become
numbers, and values starting with ``.`` or ``#`` become class/id selectors.
A single clause with no ``:`` is positional shorthand stored under the empty
key; in a multi-clause string a bare word is a presence flag (value True).
Attribute values that look like JSON objects (used by custom elements such as
esc-watch) are accepted and folded into the same value space.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterator, Union

from .errors import DuplicateId, EmptyKey, MalformedAttribute, UnbalancedTag

TEXT_TAG = "#text"

# Tags whose content is raw text (no child elements, no entity decoding).
RAW_TEXT_TAGS = {"script", "style"}


@dataclass(frozen=True)
class Selector:
    """A DOM-style selector: ``#x`` (id), ``.x`` (class) or ``x`` (tag)."""

    kind: str  # "id" | "class" | "tag"
    name: str

    def __str__(self) -> str:
        prefix = {"id": "#", "class": ".", "tag": ""}[self.kind]
        return prefix + self.name


def parse_selector(raw: str) -> Selector:
    raw = raw.strip()
    if not raw:
        raise ValueError("empty selector")
    if raw.startswith("#"):
        return Selector("id", raw[1:])
    if raw.startswith("."):
        return Selector("class", raw[1:])
    return Selector("tag", raw)


def as_selector(value: "Value") -> Selector:
    """Coerce a component value into a Selector (bare strings become tags)."""
    if isinstance(value, Selector):
        return value
    if isinstance(value, str):
        return parse_selector(value)
    raise ValueError(f"cannot interpret {value!r} as a selector")


Value = Union[str, bool, int, float, Selector, list]
ComponentMap = dict  # key str -> Value, insertion ordered


_IDENT_RE = re.compile(r"[A-Za-z_][\w-]*\Z")
_INT_RE = re.compile(r"[+-]?\d+\Z")
_FLOAT_RE = re.compile(r"[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?\Z")


def _parse_value(raw: str) -> Value:
    if raw == "":
        return ""
    if raw[0] in "#." and _IDENT_RE.match(raw[1:]):
        return Selector("id" if raw[0] == "#" else "class", raw[1:])
    if "," in raw:
        return [part.strip() for part in raw.split(",")]
    if raw == "true":
        return True
    if raw == "false":
        return False
    if _INT_RE.match(raw):
        return int(raw)
    if _FLOAT_RE.match(raw):
        return float(raw)
    return raw


def _value_from_json(obj) -> Value:
    if isinstance(obj, str):
        if obj and obj[0] in "#." and _IDENT_RE.match(obj[1:]):
            return Selector("id" if obj[0] == "#" else "class", obj[1:])
        return obj
    if isinstance(obj, bool) or isinstance(obj, (int, float)):
        return obj
    if isinstance(obj, list):
        return [str(item) for item in obj]
    # Nested objects are outside the value space; keep their JSON text.
    return json.dumps(obj)


def parse_component_map(raw: str) -> ComponentMap:
    """Parse a component attribute string into an ordered key/value map.

    Total on any string whose clauses have non-empty keys; raises EmptyKey
    when a clause starts with ``:``.
    """
    stripped = raw.strip()
    if not stripped:
        return {}
    if stripped[0] == "{":
        try:
            obj = json.loads(stripped)
        except ValueError:
            obj = None
        if isinstance(obj, dict):
            return {str(k): _value_from_json(v) for k, v in obj.items()}
    clauses = [c for c in stripped.split(";") if c.strip()]
    out: ComponentMap = {}
    if len(clauses) == 1 and ":" not in clauses[0]:
        return {"": _parse_value(clauses[0].strip())}
    for position, clause in enumerate(clauses):
        if ":" in clause:
            key, _, value = clause.partition(":")
            key = key.strip()
            if not key:
                raise EmptyKey(position)
            out[key] = _parse_value(value.strip())
        else:
            out[clause.strip()] = True
    return out


def serialize_value(value: Value) -> str:
    if isinstance(value, Selector):
        return str(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, list):
        return ",".join(str(item) for item in value)
    return str(value)


def serialize_component_map(cmap: ComponentMap) -> str:
    if list(cmap.keys()) == [""]:
        return serialize_value(cmap[""])
    return "; ".join(f"{k}: {serialize_value(v)}" for k, v in cmap.items())


# --------------------------------------------------------------------------
# Entity tree


@dataclass(eq=False)
class Entity:
    """One node of the scene tree. Text nodes use tag ``#text``."""

    tag: str
    id: str | None = None
    classes: list[str] = field(default_factory=list)
    components: dict[str, ComponentMap] = field(default_factory=dict)
    children: list["Entity"] = field(default_factory=list)
    text: str | None = None
    line: int = 0
    parent: "Entity | None" = field(default=None, repr=False)

    @property
    def is_text(self) -> bool:
        return self.tag == TEXT_TAG

    def text_content(self) -> str:
        if self.is_text:
            return self.text or ""
        return "".join(child.text_content() for child in self.children)

    def component(self, name: str) -> ComponentMap | None:
        return self.components.get(name)

    def attr(self, name: str, default=None):
        """Bare attribute value, e.g. href="/x.html" -> "/x.html"."""
        cmap = self.components.get(name)
        if cmap is not None and list(cmap.keys()) == [""]:
            return cmap[""]
        return default

    def element_children(self) -> list["Entity"]:
        return [c for c in self.children if not c.is_text]

    def walk(self) -> Iterator["Entity"]:
        """Document-order traversal of element nodes, including self."""
        if not self.is_text:
            yield self
        for child in self.children:
            yield from child.walk()

    def matches(self, sel: Selector) -> bool:
        if self.is_text:
            return False
        if sel.kind == "id":
            return self.id == sel.name
        if sel.kind == "class":
            return sel.name in self.classes
        return self.tag == sel.name

    def __eq__(self, other) -> bool:  # structural, ignores line/parent
        if not isinstance(other, Entity):
            return NotImplemented
        return (
            self.tag == other.tag
            and self.id == other.id
            and self.classes == other.classes
            and self.components == other.components
            and self.text == other.text
            and self.children == other.children
        )

    def __hash__(self) -> int:
        return id(self)


@dataclass
class SceneDocument:
    root: Entity
    entities_by_id: dict[str, Entity]

    def walk(self) -> Iterator[Entity]:
        return self.root.walk()

    def select(self, selector: Selector | str) -> list[Entity]:
        if isinstance(selector, str):
            selector = parse_selector(selector)
        return query_select(self, selector)

    def get(self, entity_id: str) -> Entity | None:
        return self.entities_by_id.get(entity_id)


def query_select(doc: SceneDocument | Entity, sel: Selector) -> list[Entity]:
    """All entities matching the selector, in document order."""
    root = doc.root if isinstance(doc, SceneDocument) else doc
    return [e for e in root.walk() if e.matches(sel)]


# --------------------------------------------------------------------------
# Parser

_ENTITY_DECODE_RE = re.compile(r"&(amp|lt|gt|quot);")
_DECODE = {"amp": "&", "lt": "<", "gt": ">", "quot": '"'}
_ATTR_RE = re.compile(
    r"\s*([^\s=/>\"']+)"
    r"(?:\s*=\s*(?:\"([^\"]*)\"|'([^']*)'|([^\s>\"']+)))?"
)
_TAG_NAME_RE = re.compile(r"[A-Za-z][\w.:-]*")
_WS_RE = re.compile(r"\s+")


def _decode_text(raw: str) -> str:
    return _ENTITY_DECODE_RE.sub(lambda m: _DECODE[m.group(1)], raw)


def _encode_text(raw: str) -> str:
    return raw.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _encode_attr(raw: str) -> str:
    return _encode_text(raw).replace('"', "&quot;")


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.pos = 0

    def line(self, pos: int | None = None) -> int:
        end = self.pos if pos is None else pos
        return self.source.count("\n", 0, end) + 1

    def parse_nodes(self) -> list[Entity]:
        """Parse a sequence of sibling nodes until EOF."""
        nodes: list[Entity] = []
        src = self.source
        n = len(src)
        while self.pos < n:
            lt = src.find("<", self.pos)
            if lt == -1:
                self._emit_text(nodes, src[self.pos:])
                self.pos = n
                break
            if lt > self.pos:
                self._emit_text(nodes, src[self.pos:lt])
                self.pos = lt
            if src.startswith("<!--", self.pos):
                end = src.find("-->", self.pos)
                if end == -1:
                    raise UnbalancedTag("unterminated comment", self.line())
                self.pos = end + 3
                continue
            if src.startswith("<!", self.pos):
                end = src.find(">", self.pos)
                if end == -1:
                    raise UnbalancedTag("unterminated declaration", self.line())
                self.pos = end + 1
                continue
            if src.startswith("</", self.pos):
                # Close tag belongs to the caller; stop here.
                break
            nodes.append(self._parse_element())
        return nodes

    def _emit_text(self, nodes: list[Entity], raw: str) -> None:
        collapsed = _WS_RE.sub(" ", _decode_text(raw)).strip()
        if collapsed:
            nodes.append(Entity(tag=TEXT_TAG, text=collapsed, line=self.line()))

    def _find_tag_end(self, start: int) -> int:
        """Index of the ``>`` closing a tag, skipping quoted attribute values."""
        src = self.source
        i = start
        quote = None
        while i < len(src):
            ch = src[i]
            if quote:
                if ch == quote:
                    quote = None
            elif ch in "\"'":
                quote = ch
            elif ch == ">":
                return i
            i += 1
        raise MalformedAttribute("unterminated tag", self.line(start))

    def _parse_element(self) -> Entity:
        src = self.source
        open_line = self.line()
        gt = self._find_tag_end(self.pos)
        inner = src[self.pos + 1:gt]
        self.pos = gt + 1

        self_closing = inner.rstrip().endswith("/")
        if self_closing:
            inner = inner.rstrip()[:-1]
        m = _TAG_NAME_RE.match(inner)
        if not m:
            raise MalformedAttribute("missing tag name", open_line)
        tag = m.group(0)
        entity = Entity(tag=tag, line=open_line)
        self._parse_attributes(entity, inner[m.end():], open_line)

        if self_closing:
            return entity
        if tag in RAW_TEXT_TAGS:
            close = f"</{tag}>"
            end = src.find(close, self.pos)
            if end == -1:
                raise UnbalancedTag(f"<{tag}> never closed", open_line)
            raw = src[self.pos:end]
            if raw:
                entity.children.append(Entity(tag=TEXT_TAG, text=raw, line=self.line()))
            self.pos = end + len(close)
            for child in entity.children:
                child.parent = entity
            return entity

        entity.children = self.parse_nodes()
        for child in entity.children:
            child.parent = entity
        if not src.startswith("</", self.pos):
            raise UnbalancedTag(f"<{tag}> never closed", open_line)
        close_line = self.line()
        gt = src.find(">", self.pos)
        if gt == -1:
            raise UnbalancedTag("unterminated close tag", close_line)
        close_name = src[self.pos + 2:gt].strip()
        if close_name != tag:
            raise UnbalancedTag(
                f"</{close_name}> does not match <{tag}>", close_line
            )
        self.pos = gt + 1
        return entity

    def _parse_attributes(self, entity: Entity, raw: str, line: int) -> None:
        pos = 0
        while pos < len(raw):
            if raw[pos].isspace():
                pos += 1
                continue
            m = _ATTR_RE.match(raw, pos)
            if not m or m.end() == pos:
                raise MalformedAttribute(f"bad attribute syntax near {raw[pos:pos+20]!r}", line)
            name = m.group(1)
            value = next((g for g in m.group(2, 3, 4) if g is not None), "")
            value = _decode_text(value)
            if name == "id":
                entity.id = value
            elif name == "class":
                entity.classes = list(dict.fromkeys(value.split()))
            else:
                try:
                    entity.components[name] = parse_component_map(value)
                except EmptyKey as exc:
                    raise MalformedAttribute(
                        f"component {name!r}: {exc}", line
                    ) from exc
            pos = m.end()


def parse_fragment(source: str) -> list[Entity]:
    """Parse markup that may contain several sibling root elements."""
    parser = _Parser(source)
    nodes = parser.parse_nodes()
    if parser.pos < len(source):
        raise UnbalancedTag("close tag without open tag", parser.line())
    _check_ids(nodes)
    return nodes


def parse_scene(source: str) -> SceneDocument:
    """Parse a scene file into a SceneDocument with a single element root."""
    nodes = parse_fragment(source)
    elements = [n for n in nodes if not n.is_text]
    if len(elements) != 1:
        raise UnbalancedTag(
            f"expected exactly one root element, found {len(elements)}", 1
        )
    if any(n.is_text for n in nodes):
        raise UnbalancedTag("text outside the root element", nodes[0].line)
    root = elements[0]
    ids: dict[str, Entity] = {}
    for entity in root.walk():
        if entity.id is not None:
            ids[entity.id] = entity
    return SceneDocument(root=root, entities_by_id=ids)


def _check_ids(nodes: list[Entity]) -> None:
    seen: dict[str, int] = {}
    for node in nodes:
        for entity in node.walk():
            if entity.id is not None:
                if entity.id in seen:
                    raise DuplicateId(entity.id, entity.line)
                seen[entity.id] = entity.line


# --------------------------------------------------------------------------
# Serializer


def serialize_entity(entity: Entity) -> str:
    if entity.is_text:
        return _encode_text(entity.text or "")
    parts = [f"<{entity.tag}"]
    if entity.id is not None:
        parts.append(f' id="{_encode_attr(entity.id)}"')
    if entity.classes:
        parts.append(f' class="{_encode_attr(" ".join(entity.classes))}"')
    for name, cmap in entity.components.items():
        parts.append(f' {name}="{_encode_attr(serialize_component_map(cmap))}"')
    parts.append(">")
    if entity.tag in RAW_TEXT_TAGS:
        parts.extend(child.text or "" for child in entity.children)
    else:
        parts.extend(serialize_entity(child) for child in entity.children)
    parts.append(f"</{entity.tag}>")
    return "".join(parts)


def serialize_scene(doc: SceneDocument) -> str:
    return serialize_entity(doc.root)
