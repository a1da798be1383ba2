"""Reading and writing Mealy machines in Graphviz DOT."""

import re

from .mealy import MealyMachine


class DotError(ValueError):
    def __init__(self, msg, line=None, col=None):
        where = f" at line {line}, column {col}" if line is not None else ""
        super().__init__(msg + where)
        self.line, self.col = line, col


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>//[^\n]*|\#[^\n]*|/\*.*?\*/)
  | (?P<arrow>->|--)
  | (?P<punct>[{}\[\];,=:])
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<id>[A-Za-z_0-9.\u0080-\uffff]+)
""", re.VERBOSE | re.DOTALL)


def _tokenize(text):
    pos, line, line_start = 0, 1, 0
    toks = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise DotError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        value = m.group()
        if kind == "string":
            toks.append(("id", re.sub(r'\\(.)', r'\1', value[1:-1]), line, pos - line_start + 1))
        elif kind not in ("ws", "comment"):
            toks.append((kind if kind != "punct" else value, value, line, pos - line_start + 1))
        nl = value.count("\n")
        if nl:
            line += nl
            line_start = pos + value.rindex("\n") + 1
        pos = m.end()
    return toks


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.toks[self.k] if self.k < len(self.toks) else ("eof", "", None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if (kind and tok[0] != kind) or (value and tok[1].lower() != value):
            want = value or kind
            raise DotError(f"expected {want!r}, found {tok[1] or 'end of input'!r}", tok[2], tok[3])
        self.k += 1
        return tok

    def attrs(self):
        res = {}
        while self.peek()[0] == "[":
            self.take("[")
            while self.peek()[0] != "]":
                key = self.take("id")[1]
                self.take("=")
                res[key] = self.take("id")[1]
                if self.peek()[0] in (",", ";"):
                    self.k += 1
            self.take("]")
        return res

    def graph(self):
        if self.peek()[1].lower() == "strict":
            self.k += 1
        head = self.take("id")
        if head[1].lower() not in ("digraph", "graph"):
            raise DotError("expected 'digraph'", head[2], head[3])
        if self.peek()[0] == "id":
            self.k += 1
        self.take("{")
        nodes, edges = [], []
        while self.peek()[0] != "}":
            tok = self.peek()
            if tok[0] == ";":
                self.k += 1
                continue
            if tok[0] == "eof":
                raise DotError("unterminated graph body", tok[2], tok[3])
            name = self.take("id")
            if name[1] in ("graph", "node", "edge") and self.peek()[0] == "[":
                self.attrs()
                continue
            if self.peek()[0] == "=":
                self.k += 1
                self.take("id")
                continue
            if self.peek()[0] == "arrow":
                self.k += 1
                dst = self.take("id")
                if self.peek()[0] == "arrow":
                    t = self.peek()
                    raise DotError("edge chains are not supported", t[2], t[3])
                edges.append((name, dst, self.attrs()))
            else:
                nodes.append((name, self.attrs()))
        self.take("}")
        return nodes, edges


def parse_dot(text):
    """Parse a DOT digraph whose edges are labelled ``input / output``."""
    nodes, edges = _Parser(text).graph()
    order = []
    initial = None
    trans, out = {}, {}
    inputs, outputs = {}, {}

    def declare(n):
        if not n.startswith("__start") and n not in order:
            order.append(n)

    for tok, _ in nodes:
        declare(tok[1])
    for src, dst, attrs in edges:
        s, d = src[1], dst[1]
        if s.startswith("__start"):
            if initial is not None and initial != d:
                raise DotError("more than one initial state", src[2], src[3])
            initial = d
            declare(d)
            continue
        declare(s)
        declare(d)
        label = attrs.get("label")
        if label is None or "/" not in label:
            raise DotError(f"edge {s} -> {d} needs a label 'input / output'", src[2], src[3])
        i, o = (part.strip() for part in label.split("/", 1))
        if (s, i) in trans:
            raise DotError(f"nondeterministic edges for ({s}, {i})", src[2], src[3])
        trans[(s, i)] = d
        out[(s, i)] = o
        inputs.setdefault(i, None)
        outputs.setdefault(o, None)
    if initial is None:
        if not order:
            raise DotError("no states and no initial state")
        initial = order[0]
    return MealyMachine(order, sorted(inputs), initial, trans, out, sorted(outputs))


def _quote(s):
    s = str(s)
    if re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", s):
        return s
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def write_dot(m, name="g"):
    """DOT text for ``m``; non-string state ids are renamed s0, s1, ..."""
    if all(isinstance(q, str) and not q.startswith("__start") for q in m.states):
        names = {q: q for q in m.states}
    else:
        names = {q: f"s{n}" for n, q in enumerate(m.states)}
    lines = [f"digraph {name} {{", '    __start0 [label="" shape="none"];']
    for q in m.states:
        lines.append(f'    {_quote(names[q])} [shape="circle" label={_quote(names[q])}];')
    for q in m.states:
        for i in m.inputs:
            nxt = m.step(q, i)
            if nxt is not None:
                label = _quote(f"{i} / {nxt[1]}")
                lines.append(f"    {_quote(names[q])} -> {_quote(names[nxt[0]])} [label={label}];")
    lines.append(f"    __start0 -> {_quote(names[m.initial])};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def read_dot(path):
    with open(path) as f:
        return parse_dot(f.read())
