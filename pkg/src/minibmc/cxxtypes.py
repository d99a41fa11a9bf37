"""Static type representations for MiniCxx expressions and declarations.

Types are immutable values. Two renderings exist: `ctype_text` mimics the
C-style spelling used in GOTO listings ("signed int", "struct Foo *"), and
`tag_text` is the canonical compact spelling used for exception tags and
template mangling ("int", "Foo*").
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class ThrowSpec:
    """Declared exception behaviour of a function.

    kind is "dynamic" (throw(T, ...)) or "noexcept".  An absent spec is
    represented by None on the function type, not by a ThrowSpec.
    """

    kind: str
    types: tuple["TypeRepr", ...] = ()

    def __post_init__(self):
        if self.kind not in ("dynamic", "noexcept"):
            raise ValueError(f"bad throw spec kind {self.kind!r}")
        # dynamic lists are de-duplicated, order preserved
        if self.kind == "dynamic":
            seen, kept = set(), []
            for t in self.types:
                key = tag_text(t)
                if key not in seen:
                    seen.add(key)
                    kept.append(t)
            object.__setattr__(self, "types", tuple(kept))


@dataclass(frozen=True)
class TypeRepr:
    """One node of a static type.

    kind: int | bool | char | float | class | ptr | lref | rref | array | func
    Only the fields relevant to the kind are populated.  `float` types are
    name-only (e.g. "double"); their values never reach arithmetic encoding.
    """

    kind: str
    width: int = 0                       # int only (bits)
    name: str = ""                       # class / float name
    to: "TypeRepr | None" = None         # ptr/lref/rref target, array element
    length: int | None = None            # array: None = unknown extent
    params: tuple["TypeRepr", ...] = ()  # func
    ret: "TypeRepr | None" = None        # func
    throw_spec: ThrowSpec | None = None  # func
    is_const: bool = False

    def __post_init__(self):
        if self.kind in ("lref", "rref") and self.to is not None:
            if self.to.kind in ("lref", "rref"):
                raise ValueError("reference to reference is not a type")
        if self.kind == "array" and self.length is not None and self.length < 0:
            raise ValueError("array length must be non-negative")

    # --- shape predicates -------------------------------------------------
    @property
    def is_reference(self) -> bool:
        return self.kind in ("lref", "rref")

    @property
    def is_arithmetic(self) -> bool:
        return self.kind in ("int", "bool", "char")

    @property
    def is_void(self) -> bool:
        return self.kind == "class" and self.name == "void"

    def strip_ref(self) -> "TypeRepr":
        return self.to if self.is_reference else self

    def strip_const(self) -> "TypeRepr":
        if not self.is_const:
            return self
        return dataclass_replace(self, is_const=False)


def dataclass_replace(t: TypeRepr, **kw) -> TypeRepr:
    from dataclasses import replace

    return replace(t, **kw)


# --- constructors ---------------------------------------------------------

VOID = TypeRepr("class", name="void")
BOOL_T = TypeRepr("bool")
CHAR_T = TypeRepr("char")


def int_t(width: int = 32) -> TypeRepr:
    return TypeRepr("int", width=width)


def float_t(name: str = "double") -> TypeRepr:
    return TypeRepr("float", name=name)


def class_t(name: str, const: bool = False) -> TypeRepr:
    return TypeRepr("class", name=name, is_const=const)


def ptr(to: TypeRepr, const: bool = False) -> TypeRepr:
    return TypeRepr("ptr", to=to, is_const=const)


def lref(to: TypeRepr) -> TypeRepr:
    return TypeRepr("lref", to=to)


def rref(to: TypeRepr) -> TypeRepr:
    return TypeRepr("rref", to=to)


def array_t(elem: TypeRepr, length: int | None) -> TypeRepr:
    return TypeRepr("array", to=elem, length=length)


def func_t(params: tuple[TypeRepr, ...], ret: TypeRepr,
           throw_spec: ThrowSpec | None = None) -> TypeRepr:
    return TypeRepr("func", params=params, ret=ret, throw_spec=throw_spec)


# --- rendering ------------------------------------------------------------

def tag_text(t: TypeRepr) -> str:
    """Canonical compact spelling; ignores top-level const."""
    if t.kind == "int":
        return "int"
    if t.kind == "bool":
        return "bool"
    if t.kind == "char":
        return "char"
    if t.kind == "float":
        return t.name
    if t.kind == "class":
        return t.name
    if t.kind == "ptr":
        inner = tag_text_cv(t.to)
        return f"{inner}*"
    if t.kind == "lref":
        return f"{tag_text_cv(t.to)}&"
    if t.kind == "rref":
        return f"{tag_text_cv(t.to)}&&"
    if t.kind == "array":
        n = "" if t.length is None else str(t.length)
        return f"{tag_text_cv(t.to)}[{n}]"
    if t.kind == "func":
        args = ",".join(tag_text_cv(p) for p in t.params)
        return f"{tag_text_cv(t.ret)}({args})"
    raise ValueError(f"unknown type kind {t.kind}")


def tag_text_cv(t: TypeRepr) -> str:
    """Like tag_text but keeps const below the top level."""
    base = tag_text(t)
    return f"const {base}" if t.is_const else base


def type_tag(t: TypeRepr) -> str:
    """Exception-matching tag; equal up to top-level cv qualifiers."""
    return "tag-" + tag_text(t.strip_ref())


def ctype_text(t: TypeRepr) -> str:
    """C-style spelling used in GOTO listings."""
    if t.kind == "int":
        return "signed int"
    if t.kind == "bool":
        return "bool"
    if t.kind == "char":
        return "char"
    if t.kind == "float":
        return t.name
    if t.kind == "class":
        return t.name if t.name == "void" else f"struct {t.name}"
    if t.kind == "ptr":
        return f"{ctype_text(t.to)} *"
    if t.kind in ("lref", "rref"):
        # references lower to pointers in the GOTO program
        return f"{ctype_text(t.to)} *"
    if t.kind == "array":
        n = "" if t.length is None else str(t.length)
        return f"{ctype_text(t.to)}[{n}]"
    if t.kind == "func":
        args = ", ".join(ctype_text(p) for p in t.params)
        return f"{ctype_text(t.ret)}({args})"
    raise ValueError(f"unknown type kind {t.kind}")


def types_equal(a: TypeRepr, b: TypeRepr, ignore_cv: bool = False) -> bool:
    """Structural equality, optionally ignoring const at every level."""
    if a.kind != b.kind:
        return False
    if not ignore_cv and a.is_const != b.is_const:
        return False
    if a.kind in ("int",):
        return a.width == b.width
    if a.kind in ("bool", "char"):
        return True
    if a.kind in ("float", "class"):
        return a.name == b.name
    if a.kind in ("ptr", "lref", "rref"):
        return types_equal(a.to, b.to, ignore_cv)
    if a.kind == "array":
        return a.length == b.length and types_equal(a.to, b.to, ignore_cv)
    if a.kind == "func":
        if len(a.params) != len(b.params):
            return False
        if not types_equal(a.ret, b.ret, ignore_cv):
            return False
        return all(types_equal(p, q, ignore_cv) for p, q in zip(a.params, b.params))
    return False
