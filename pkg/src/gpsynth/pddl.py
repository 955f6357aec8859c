"""Reader and writer for the STRIPS (+ typing) fragment of PDDL."""

from __future__ import annotations

from dataclasses import dataclass

from .model import ActionSchema, ModelError, Predicate, StripsDomain, StripsInstance

SUPPORTED_REQUIREMENTS = {":strips", ":typing"}


class PDDLError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line, self.column = line, column
        where = f"{line}:{column}: " if line else ""
        super().__init__(f"{where}{message}")


@dataclass
class Token:
    text: str
    line: int
    column: int


class SList(list):
    """A parenthesised list that remembers where it opened."""

    line = 0
    column = 0


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "\n":
            line, col = line + 1, 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch in "()":
            tokens.append(Token(ch, line, col))
            i += 1
            col += 1
            continue
        start, start_col = i, col
        while i < n and not text[i].isspace() and text[i] not in "();":
            i += 1
            col += 1
        tokens.append(Token(text[start:i].lower(), line, start_col))
    return tokens


def parse_sexpr(text: str) -> SList:
    tokens = tokenize(text)
    if not tokens:
        raise PDDLError("empty input", 1, 1)
    stack: list[SList] = []
    result = None
    for tok in tokens:
        if tok.text == "(":
            lst = SList()
            lst.line, lst.column = tok.line, tok.column
            if stack:
                stack[-1].append(lst)
            stack.append(lst)
        elif tok.text == ")":
            if not stack:
                raise PDDLError("unbalanced ')'", tok.line, tok.column)
            done = stack.pop()
            if not stack:
                if result is not None:
                    raise PDDLError("trailing expression", tok.line, tok.column)
                result = done
        else:
            if not stack:
                raise PDDLError(f"unexpected token {tok.text!r}", tok.line, tok.column)
            stack[-1].append(tok)
    if stack:
        raise PDDLError("unbalanced '(' ", stack[-1].line, stack[-1].column)
    return result


def _pos(x):
    return (x.line, x.column)


def _word(x, what="identifier") -> str:
    if not isinstance(x, Token):
        raise PDDLError(f"expected {what}", *_pos(x))
    return x.text


def _typed_list(items, default="object") -> list[tuple[str, str]]:
    """Parse ``a b - t c`` into [(a, t), (b, t), (c, object)]."""
    result, pending = [], []
    i = 0
    while i < len(items):
        word = _word(items[i])
        if word == "-":
            if i + 1 >= len(items) or pending == []:
                raise PDDLError("dangling '-' in typed list", *_pos(items[i]))
            typ = _word(items[i + 1], "type name")
            result.extend((p, typ) for p in pending)
            pending = []
            i += 2
            continue
        pending.append(word)
        i += 1
    result.extend((p, default) for p in pending)
    return result


def _atoms(expr, what: str, allow_negation: bool):
    """Flatten a conjunction into (positive atoms, negative atoms)."""
    if isinstance(expr, Token):
        raise PDDLError(f"expected {what} expression", *_pos(expr))
    if not expr:
        return [], []
    head = _word(expr[0])
    if head == "and":
        pos, neg = [], []
        for sub in expr[1:]:
            p, q = _atoms(sub, what, allow_negation)
            pos += p
            neg += q
        return pos, neg
    if head == "not":
        if not allow_negation:
            raise PDDLError(f"negative {what} is not supported", *_pos(expr))
        if len(expr) != 2:
            raise PDDLError("malformed 'not'", *_pos(expr))
        p, q = _atoms(expr[1], what, False)
        if q or len(p) != 1:
            raise PDDLError("malformed 'not'", *_pos(expr))
        return [], p
    if head in ("or", "imply", "exists", "forall", "when", "increase", "decrease", "="):
        raise PDDLError(f"unsupported construct '{head}' in {what}", *_pos(expr))
    return [tuple(_word(t) for t in expr)], []


def _check_atom(atom, predicates, where, pos):
    pred = predicates.get(atom[0])
    if pred is None:
        raise PDDLError(f"unknown predicate {atom[0]!r} in {where}", *pos)
    if pred.arity != len(atom) - 1:
        raise PDDLError(f"predicate {atom[0]} expects {pred.arity} arguments in {where}", *pos)


def parse_domain(text: str) -> StripsDomain:
    tree = parse_sexpr(text)
    if len(tree) < 2 or _word(tree[0]) != "define" or isinstance(tree[1], Token) \
            or len(tree[1]) != 2 or _word(tree[1][0]) != "domain":
        raise PDDLError("expected (define (domain <name>) ...)", *_pos(tree))
    name = _word(tree[1][1])
    types: dict[str, str | None] = {}
    constants: list[tuple[str, str]] = []
    predicates: dict[str, Predicate] = {}
    schemas: dict[str, ActionSchema] = {}
    requirements: list[str] = []
    for section in tree[2:]:
        if isinstance(section, Token) or not section:
            raise PDDLError("expected a domain section", *_pos(section))
        key = _word(section[0])
        body = section[1:]
        if key == ":requirements":
            for req in body:
                r = _word(req)
                if r not in SUPPORTED_REQUIREMENTS:
                    raise PDDLError(f"unsupported requirement {r}", *_pos(req))
                requirements.append(r)
        elif key == ":types":
            for t, parent in _typed_list(body):
                types[t] = None if t == "object" else parent
        elif key == ":constants":
            constants.extend(_typed_list(body))
        elif key == ":predicates":
            for p in body:
                if isinstance(p, Token) or not p:
                    raise PDDLError("malformed predicate declaration", *_pos(p))
                pname = _word(p[0])
                params = _typed_list(p[1:])
                predicates[pname] = Predicate(pname, tuple(t for _, t in params))
        elif key == ":action":
            schema = _parse_action(body, predicates, section)
            schemas[schema.name] = schema
        else:
            raise PDDLError(f"unsupported domain section {key}", *_pos(section))
    for t, parent in list(types.items()):
        if parent is not None and parent != "object" and parent not in types:
            types[parent] = "object"
    for pred in predicates.values():
        for t in pred.types:
            if t != "object" and t not in types:
                raise PDDLError(f"predicate {pred.name} uses undeclared type {t}")
    try:
        return StripsDomain(name, predicates, schemas, types, constants, tuple(requirements))
    except ModelError as exc:
        raise PDDLError(str(exc)) from None


def _parse_action(body, predicates, section) -> ActionSchema:
    if not body:
        raise PDDLError("action without a name", *_pos(section))
    name = _word(body[0])
    params: list[tuple[str, str]] = []
    pre, add, delete = [], [], []
    i = 1
    while i < len(body):
        key = _word(body[i])
        if i + 1 >= len(body):
            raise PDDLError(f"missing value for {key}", *_pos(body[i]))
        val = body[i + 1]
        if key == ":parameters":
            if isinstance(val, Token):
                raise PDDLError("expected parameter list", *_pos(val))
            params = _typed_list(val)
        elif key == ":precondition":
            pre, _ = _atoms(val, "precondition", allow_negation=False)
        elif key == ":effect":
            add, delete = _atoms(val, "effect", allow_negation=True)
        else:
            raise PDDLError(f"unsupported action field {key}", *_pos(body[i]))
        i += 2
    names = {p for p, _ in params}
    for atom in pre + add + delete:
        _check_atom(atom, predicates, f"action {name}", _pos(section))
        for term in atom[1:]:
            if term not in names:
                raise PDDLError(f"action {name}: unknown term {term}", *_pos(section))
    # delete-then-add semantics: an atom both added and deleted stays true
    delete = [a for a in delete if a not in add]
    return ActionSchema(name, tuple(params), frozenset(pre), frozenset(add), frozenset(delete))


def parse_instance(text: str, domain: StripsDomain) -> StripsInstance:
    tree = parse_sexpr(text)
    if len(tree) < 2 or _word(tree[0]) != "define" or isinstance(tree[1], Token) \
            or len(tree[1]) != 2 or _word(tree[1][0]) != "problem":
        raise PDDLError("expected (define (problem <name>) ...)", *_pos(tree))
    name = _word(tree[1][1])
    objects = list(domain.constants)
    init, goal = [], []
    for section in tree[2:]:
        if isinstance(section, Token) or not section:
            raise PDDLError("expected a problem section", *_pos(section))
        key = _word(section[0])
        body = section[1:]
        if key == ":domain":
            dname = _word(body[0]) if body else ""
            if dname != domain.name:
                raise PDDLError(f"problem is for domain {dname!r}, not {domain.name!r}",
                                *_pos(section))
        elif key == ":objects":
            objects.extend(_typed_list(body))
        elif key == ":init":
            for atom in body:
                pos, _ = _atoms(atom, "init", allow_negation=False)
                init.extend((a, _pos(atom)) for a in pos)
        elif key == ":goal":
            if len(body) != 1:
                raise PDDLError("goal must be a single expression", *_pos(section))
            pos, _ = _atoms(body[0], "goal", allow_negation=False)
            goal.extend((a, _pos(body[0])) for a in pos)
        elif key == ":requirements":
            continue
        else:
            raise PDDLError(f"unsupported problem section {key}", *_pos(section))
    known = {}
    for obj, typ in objects:
        if obj in known:
            raise PDDLError(f"duplicate object {obj}")
        if typ != "object" and typ not in domain.types:
            raise PDDLError(f"object {obj} has undeclared type {typ}")
        known[obj] = typ
    for where, atoms in (("init", init), ("goal", goal)):
        for atom, pos in atoms:
            _check_atom(atom, domain.predicates, where, pos)
            pred = domain.predicates[atom[0]]
            for obj, typ in zip(atom[1:], pred.types):
                if obj not in known:
                    raise PDDLError(f"unknown object {obj!r} in {where}", *pos)
                if not domain.is_subtype(known[obj], typ):
                    raise PDDLError(f"object {obj} is not of type {typ} in {where}", *pos)
    return StripsInstance(name, domain, objects, [a for a, _ in init], [a for a, _ in goal])


def _fmt_typed(items) -> str:
    return " ".join(f"{n} - {t}" for n, t in items)


def _fmt_atom(atom) -> str:
    return "(" + " ".join(atom) + ")"


def domain_to_pddl(domain: StripsDomain) -> str:
    out = [f"(define (domain {domain.name})"]
    reqs = domain.requirements or (":strips", ":typing")
    out.append(f"  (:requirements {' '.join(reqs)})")
    if domain.types:
        out.append("  (:types " + " ".join(
            f"{t} - {p}" if p else t for t, p in domain.types.items() if t != "object") + ")")
    if domain.constants:
        out.append(f"  (:constants {_fmt_typed(domain.constants)})")
    preds = []
    for p in domain.predicates.values():
        args = " ".join(f"?x{i} - {t}" for i, t in enumerate(p.types))
        preds.append(f"({p.name}{' ' + args if args else ''})")
    out.append("  (:predicates " + " ".join(preds) + ")")
    for s in domain.schemas.values():
        out.append(f"  (:action {s.name}")
        out.append(f"    :parameters ({_fmt_typed(s.params)})")
        out.append("    :precondition (and " + " ".join(_fmt_atom(a) for a in sorted(s.pre)) + ")")
        effs = [_fmt_atom(a) for a in sorted(s.add)]
        effs += [f"(not {_fmt_atom(a)})" for a in sorted(s.delete)]
        out.append("    :effect (and " + " ".join(effs) + "))")
    out.append(")")
    return "\n".join(out) + "\n"


def instance_to_pddl(instance: StripsInstance) -> str:
    consts = {c for c, _ in instance.domain.constants}
    objs = [(o, instance.object_types[o]) for o in instance.objects if o not in consts]
    out = [f"(define (problem {instance.name})", f"  (:domain {instance.domain.name})"]
    out.append(f"  (:objects {_fmt_typed(objs)})")
    out.append("  (:init")
    out += [f"    {_fmt_atom(a)}" for a in sorted(instance.init_atoms, key=instance.atom_index.get)]
    out.append("  )")
    goal = sorted(instance.goal_atoms, key=instance.atom_index.get)
    out.append("  (:goal (and " + " ".join(_fmt_atom(a) for a in goal) + "))")
    out.append(")")
    return "\n".join(out) + "\n"
