"""Object models: field layouts, vtables, vptrs and thunks.

Each class with virtual methods owns one vtable per inherited
base-with-virtuals (its vptr "paths"); new virtual methods extend the
primary path's table.  The vptr stored in an object is an opaque small
integer naming a vtable; dispatch maps (vtable id, slot) to a concrete
function, going through a thunk whenever an override adjusts the receiver
view from the base to the derived class.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from minibmc.cxxtypes import TypeRepr, ctype_text, tag_text_cv
from minibmc.errors import InternalError
from minibmc.typecheck import MethodInfo, TypedProgram


def vptr_member(path_root: str) -> str:
    return f"vptr${path_root}"


def thunk_name(override_class: str, method: str, path_root: str) -> str:
    return f"thunk::{override_class}::{method}({path_root}*)"


@dataclass
class VTableSlot:
    method_name: str
    signature: TypeRepr
    declaring_class: str
    overrider_class: str

    @property
    def is_thunk(self) -> bool:
        return self.overrider_class != self.declaring_class

    def target_name(self, path_root: str) -> str:
        if self.is_thunk:
            return thunk_name(self.overrider_class, self.method_name, path_root)
        return f"{self.declaring_class}::{self.method_name}"


@dataclass
class VTable:
    owner: str
    path_root: str
    slots: list[VTableSlot]
    vtable_id: int = 0

    @property
    def name(self) -> str:
        return f"{self.owner}@{self.path_root}"


@dataclass
class ObjectModel:
    class_name: str
    vptr_paths: list[str]                       # path roots, declaration order
    fields: list[tuple[str, str, TypeRepr]]     # (declaring class, name, type)


@dataclass
class ThunkInfo:
    name: str
    override_class: str
    method: MethodInfo
    path_root: str


@dataclass
class DispatchPlan:
    path_root: str
    slot_index: int
    method_name: str
    candidates: list[tuple[int, str]]  # (vtable id, target function), id order


@dataclass
class Layouts:
    models: dict[str, ObjectModel]
    vtables: dict[tuple[str, str], VTable]      # (owner, path root)
    thunks: dict[str, ThunkInfo]
    tp: TypedProgram

    def vtable_id(self, owner: str, path_root: str) -> int:
        return self.vtables[(owner, path_root)].vtable_id

    def resolve_virtual_call(self, static_class: str, method_name: str) -> DispatchPlan:
        model = self.models[static_class]
        for p in model.vptr_paths:
            vt = self.vtables[(static_class, p)]
            for i, slot in enumerate(vt.slots):
                if slot.method_name == method_name:
                    return DispatchPlan(p, i, method_name,
                                        self._candidates(p, i))
        raise InternalError(
            f"virtual method {method_name!r} not found in any vtable of {static_class!r}")

    def _candidates(self, path_root: str, slot_index: int) -> list[tuple[int, str]]:
        out = []
        for (owner, p), vt in self.vtables.items():
            if p == path_root and slot_index < len(vt.slots):
                out.append((vt.vtable_id, vt.slots[slot_index].target_name(path_root)))
        out.sort()
        return out


def build_object_models(tp: TypedProgram) -> Layouts:
    """Construct object models and vtables for every class."""
    paths: dict[str, list[str]] = {}
    models: dict[str, ObjectModel] = {}
    vtables: dict[tuple[str, str], VTable] = {}
    thunks: dict[str, ThunkInfo] = {}

    def class_paths(name: str) -> list[str]:
        if name in paths:
            return paths[name]
        ci = tp.classes[name]
        out: list[str] = []
        for b in ci.bases:
            if tp.has_virtuals(b):
                out.extend(class_paths(b))
        if not out and any(m.is_virtual for m in ci.methods):
            out = [name]
        paths[name] = out
        return out

    def derivation_chain(cls: str, root: str) -> list[str]:
        # unique path root -> cls; hierarchy has no repeated subobjects
        if cls == root:
            return [cls]
        ci = tp.classes[cls]
        for b in ci.bases:
            if b == root or root in tp.base_chain(b):
                return derivation_chain(b, root) + [cls]
        raise InternalError(f"{root!r} is not a base of {cls!r}")

    for name, ci in tp.classes.items():
        p = class_paths(name)
        for root in p:
            slots: list[VTableSlot] = []
            index = {}
            for k in derivation_chain(name, root):
                kprimary = class_paths(k)[0] if class_paths(k) else None
                for m in tp.classes[k].methods:
                    if not m.is_virtual or m.is_ctor or m.is_dtor:
                        continue
                    if m.name in index:
                        slots[index[m.name]].overrider_class = k
                    elif not m.is_override and kprimary == root:
                        # a newly-introduced virtual extends the primary table
                        index[m.name] = len(slots)
                        slots.append(VTableSlot(m.name, m.signature, k, k))
            vtables[(name, root)] = VTable(name, root, slots)
        flat: list[tuple[str, str, TypeRepr]] = []

        def collect_fields(c: str) -> None:
            cinfo = tp.classes[c]
            for b in cinfo.bases:
                collect_fields(b)
            for fname, fty in cinfo.fields:
                flat.append((c, fname, fty))

        collect_fields(name)
        models[name] = ObjectModel(name, list(p), flat)

    # deterministic vtable ids: class declaration order, path order, from 1
    next_id = 1
    for name in tp.classes:
        for root in paths[name]:
            vtables[(name, root)].vtable_id = next_id
            next_id += 1

    for (owner, root), vt in vtables.items():
        for slot in vt.slots:
            if slot.is_thunk:
                tn = thunk_name(slot.overrider_class, slot.method_name, root)
                if tn not in thunks:
                    target = tp.find_method(slot.overrider_class, slot.method_name)
                    thunks[tn] = ThunkInfo(tn, slot.overrider_class, target, root)

    return Layouts(models, vtables, thunks, tp)


def layout_text(layouts: Layouts) -> str:
    """Stable text rendering for --show-layout."""
    lines: list[str] = []
    for name, model in layouts.models.items():
        lines.append(f"class {name}:")
        for p in model.vptr_paths:
            vt = layouts.vtables[(name, p)]
            lines.append(f"  {vptr_member(p)} -> vtable {vt.name} [id {vt.vtable_id}]")
        for decl_cls, fname, fty in model.fields:
            lines.append(f"  field {decl_cls}::{fname}: {ctype_text(fty)}")
        for p in model.vptr_paths:
            vt = layouts.vtables[(name, p)]
            lines.append(f"vtable {vt.name} [id {vt.vtable_id}]:")
            for i, slot in enumerate(vt.slots):
                args = ", ".join(tag_text_cv(t) for t in slot.signature.params)
                lines.append(f"  slot {i}: {slot.method_name}({args}) -> "
                             f"{slot.target_name(p)}")
    return "\n".join(lines) + ("\n" if lines else "")
