"""Recursive-descent parser producing the untyped MiniCxx AST.

Template names are tracked during the parse so `foo<5678>(x)` reads as a
template-id call while `a < b` stays a comparison.  Declarations must
appear before use, as in C++.
"""

from __future__ import annotations

from minibmc import nodes as n
from minibmc.cxxtypes import (
    BOOL_T, CHAR_T, ThrowSpec, TypeRepr, VOID, array_t, class_t, float_t,
    func_t, int_t, lref, ptr, rref,
)
from minibmc.errors import ParseError, SourceLocation
from minibmc.lexer import Token, lex

BASE_TYPE_KEYWORDS = {"int", "bool", "char", "double", "float", "void"}


def token_join(texts: list[str]) -> str:
    """Join token texts, spacing only where identifiers would merge."""
    out = []
    for t in texts:
        if out and out[-1] and t and (out[-1][-1].isalnum() or out[-1][-1] == "_") \
                and (t[0].isalnum() or t[0] == "_"):
            out.append(" ")
        out.append(t)
    return "".join(out)


class Parser:
    def __init__(self, tokens: list[Token], filename: str = "<input>", int_width: int = 32):
        self.toks = tokens
        self.pos = 0
        self.filename = filename
        self.int_width = int_width
        self.class_names: set[str] = set()
        self.class_templates: set[str] = set()
        self.func_templates: set[str] = set()
        self.type_params: set[str] = set()   # active template type parameters
        self.int_params: set[str] = set()    # active template value parameters
        self.current_class: str = ""
        self.last_declarator_name: str = ""

    # --- token helpers ------------------------------------------------------
    def peek(self, ahead: int = 0) -> Token:
        i = self.pos + ahead
        if i < len(self.toks):
            return self.toks[i]
        loc = self.toks[-1].loc if self.toks else SourceLocation(self.filename)
        return Token("eof", "", loc)

    def at(self, kind: str, ahead: int = 0) -> bool:
        return self.peek(ahead).kind == kind

    def next(self) -> Token:
        t = self.peek()
        self.pos += 1
        return t

    def expect(self, kind: str) -> Token:
        t = self.peek()
        if t.kind != kind:
            what = "end of input" if t.kind == "eof" else repr(t.text)
            raise ParseError(f"expected {kind!r}, found {what}", t.loc)
        return self.next()

    def error(self, msg: str) -> ParseError:
        return ParseError(msg, self.peek().loc)

    # --- type names -----------------------------------------------------------
    def is_type_start(self, ahead: int = 0) -> bool:
        t = self.peek(ahead)
        if t.kind in BASE_TYPE_KEYWORDS or t.kind == "const":
            return True
        return t.kind == "ident" and (
            t.text in self.class_names
            or t.text in self.class_templates
            or t.text in self.type_params)

    # --- program -------------------------------------------------------------
    def parse_program(self) -> n.Program:
        decls = []
        while not self.at("eof"):
            decls.append(self.parse_top_decl())
        return n.Program(tuple(decls), filename=self.filename)

    def parse_top_decl(self):
        if self.at("template"):
            return self.parse_template_decl()
        if self.at("class") or self.at("struct"):
            return self.parse_class()
        return self.parse_func_or_global()

    # --- templates -------------------------------------------------------------
    def parse_template_params(self) -> tuple:
        self.expect("template")
        self.expect("<")
        params = []
        while True:
            t = self.peek()
            if t.kind in ("typename", "class"):
                self.next()
                name = self.expect("ident")
                params.append(n.TParam("type", name.text, loc=name.loc))
            elif t.kind == "int":
                self.next()
                name = self.expect("ident")
                params.append(n.TParam("int", name.text, loc=name.loc))
            else:
                raise self.error("expected template parameter")
            if self.at(","):
                self.next()
                continue
            break
        self.expect(">")
        return tuple(params)

    def parse_template_decl(self) -> n.TemplateDecl:
        loc = self.peek().loc
        params = self.parse_template_params()
        added_types = {p.name for p in params if p.kind == "type"} - self.type_params
        added_ints = {p.name for p in params if p.kind == "int"} - self.int_params
        self.type_params |= added_types
        self.int_params |= added_ints
        try:
            if self.at("class") or self.at("struct"):
                decl = self.parse_class(is_template=True)
            else:
                decl = self.parse_func_or_global(must_be_func=True)
        finally:
            self.type_params -= added_types
            self.int_params -= added_ints
        if isinstance(decl, n.ClassDecl):
            self.class_templates.add(decl.name)
        else:
            self.func_templates.add(decl.name)
        return n.TemplateDecl(params, decl, loc=loc)

    # --- classes ----------------------------------------------------------------
    def parse_class(self, is_template: bool = False) -> n.ClassDecl:
        kw = self.next()  # class | struct
        name = self.expect("ident")
        if is_template:
            self.class_templates.add(name.text)
        else:
            self.class_names.add(name.text)
        bases = []
        if self.at(":"):
            self.next()
            while True:
                if self.peek().kind in ("public", "private", "protected"):
                    self.next()
                if self.at("virtual"):
                    raise self.error("virtual inheritance is not supported")
                base = self.expect("ident")
                bases.append(base.text)
                if self.at(","):
                    self.next()
                    continue
                break
        self.expect("{")
        prev_class = self.current_class
        self.current_class = name.text
        fields, methods, friends = [], [], []
        try:
            while not self.at("}"):
                self.parse_member(name.text, fields, methods, friends)
        finally:
            self.current_class = prev_class
        self.expect("}")
        self.expect(";")
        return n.ClassDecl(name.text, tuple(bases), tuple(fields),
                           tuple(methods), tuple(friends),
                           is_struct=(kw.kind == "struct"), loc=kw.loc)

    def parse_member(self, class_name: str, fields, methods, friends) -> None:
        t = self.peek()
        if t.kind in ("public", "private", "protected"):
            self.next()
            self.expect(":")
            return
        if t.kind == "template":
            loc = t.loc
            params = self.parse_template_params()
            if not self.at("friend"):
                raise self.error("member templates other than friends are not supported")
            self.next()
            added_types = {p.name for p in params if p.kind == "type"} - self.type_params
            added_ints = {p.name for p in params if p.kind == "int"} - self.int_params
            self.type_params |= added_types
            self.int_params |= added_ints
            try:
                decl = self.parse_method(class_name, friend=True)
            finally:
                self.type_params -= added_types
                self.int_params -= added_ints
            self.func_templates.add(decl.name)
            friends.append(n.TemplateDecl(params, decl, enclosing=class_name, loc=loc))
            return
        if t.kind == "friend":
            raise self.error("only friend function templates are supported")
        if t.kind == "virtual" or t.kind == "~":
            methods.append(self.parse_method(class_name))
            return
        if t.kind == "ident" and t.text == class_name and self.at("(", 1):
            methods.append(self.parse_method(class_name))
            return
        # field or method: type name, then '(' decides
        ty = self.parse_type()
        name = self.expect("ident")
        if self.at("("):
            methods.append(self.parse_method_tail(class_name, ty, name, False))
        else:
            if self.at("["):
                self.next()
                length = int(self.expect("number").text)
                self.expect("]")
                ty = array_t(ty, length)
            self.expect(";")
            fields.append(n.FieldDecl(name.text, ty, loc=name.loc))

    def parse_method(self, class_name: str, friend: bool = False) -> n.MethodDecl:
        is_virtual = False
        if self.at("virtual"):
            self.next()
            is_virtual = True
        if self.at("~"):
            loc = self.next().loc
            name = self.expect("ident")
            if name.text != class_name:
                raise ParseError(f"destructor name must be ~{class_name}", name.loc)
            self.expect("(")
            if self.at("void"):
                self.next()
            self.expect(")")
            body = self.parse_block() if self.at("{") else None
            if body is None:
                self.expect(";")
            elif self.at(";"):
                self.next()
            return n.MethodDecl("~" + class_name, (), VOID, body,
                                is_virtual=is_virtual, is_dtor=True,
                                defining_class=class_name, loc=loc)
        if self.at("ident") and self.peek().text == class_name and self.at("(", 1) and not friend:
            name = self.next()
            params = self.parse_params()
            body = self.parse_block() if self.at("{") else None
            if body is None:
                self.expect(";")
            elif self.at(";"):
                self.next()
            return n.MethodDecl(class_name, params, VOID, body, is_ctor=True,
                                defining_class=class_name, loc=name.loc)
        ret = self.parse_type()
        name = self.expect("ident")
        m = self.parse_method_tail("" if friend else class_name, ret, name, is_virtual)
        return m

    def parse_method_tail(self, class_name: str, ret: TypeRepr, name: Token,
                          is_virtual: bool) -> n.MethodDecl:
        params = self.parse_params()
        if self.at("const"):
            self.next()
        is_override = False
        if self.at("override"):
            self.next()
            is_override = True
        spec = self.parse_throw_spec()
        body = self.parse_block() if self.at("{") else None
        if body is None:
            self.expect(";")
        elif self.at(";"):
            self.next()
        return n.MethodDecl(name.text, params, ret, body,
                            is_virtual=is_virtual, is_override=is_override,
                            throw_spec=spec, defining_class=class_name,
                            loc=name.loc)

    def parse_params(self) -> tuple:
        self.expect("(")
        params = []
        if self.at("void") and self.at(")", 1):
            self.next()
        while not self.at(")"):
            ty = self.parse_type()
            pname = ""
            ploc = self.peek().loc
            if self.at("ident"):
                pname = self.next().text
            params.append(n.Param(pname, ty, loc=ploc))
            if self.at(","):
                self.next()
        self.expect(")")
        return tuple(params)

    def parse_throw_spec(self) -> ThrowSpec | None:
        if self.at("noexcept"):
            self.next()
            return ThrowSpec("noexcept")
        if self.at("throw"):
            self.next()
            self.expect("(")
            types = []
            while not self.at(")"):
                types.append(self.parse_type())
                if self.at(","):
                    self.next()
            self.expect(")")
            return ThrowSpec("dynamic", tuple(types))
        return None

    # --- functions and globals ---------------------------------------------------
    def parse_func_or_global(self, must_be_func: bool = False):
        loc = self.peek().loc
        ty = self.parse_type()
        name = self.expect("ident")
        if self.at("("):
            params = self.parse_params()
            spec = self.parse_throw_spec()
            body = self.parse_block() if self.at("{") else None
            if body is None:
                self.expect(";")
            return n.MethodDecl(name.text, params, ty, body, throw_spec=spec, loc=name.loc)
        if must_be_func:
            raise self.error("expected a function template")
        init = None
        if self.at("["):
            self.next()
            length = int(self.expect("number").text)
            self.expect("]")
            ty = array_t(ty, length)
        if self.at("="):
            self.next()
            init = self.parse_expr()
        self.expect(";")
        return n.GlobalDecl(name.text, ty, init, loc=loc)

    # --- types ---------------------------------------------------------------------
    def parse_type(self) -> TypeRepr:
        is_const = False
        if self.at("const"):
            self.next()
            is_const = True
        t = self.peek()
        if t.kind == "int":
            self.next()
            base = int_t(self.int_width)
        elif t.kind == "bool":
            self.next()
            base = BOOL_T
        elif t.kind == "char":
            self.next()
            base = CHAR_T
        elif t.kind in ("double", "float"):
            self.next()
            base = float_t(t.kind)
        elif t.kind == "void":
            self.next()
            base = VOID
        elif t.kind == "ident":
            name = t.text
            if name in self.type_params:
                self.next()
                base = n.tmpl(name)  # substituted during instantiation
            elif name in self.class_templates:
                self.next()
                targs = self.parse_template_args() if self.at("<") else ()
                base = n.tmpl(name, targs)
            elif name in self.class_names:
                self.next()
                base = class_t(name)
            else:
                raise ParseError(f"unknown type name {name!r}", t.loc)
        else:
            raise self.error("expected a type")
        if self.at("const"):
            self.next()
            is_const = True
        if is_const:
            from dataclasses import replace
            base = replace(base, is_const=True)
        # function pointer: T (*)(params) or T (*name)(params)
        if self.at("(") and self.at("*", 1) and (
                self.at(")", 2) or (self.at("ident", 2) and self.at(")", 3))):
            self.next(); self.next()
            self.last_declarator_name = ""
            if self.at("ident"):
                self.last_declarator_name = self.next().text
            self.expect(")")
            self.expect("(")
            fparams = []
            if self.at("void") and self.at(")", 1):
                self.next()
            while not self.at(")"):
                fparams.append(self.parse_type())
                if self.at(","):
                    self.next()
            self.expect(")")
            return ptr(func_t(tuple(fparams), base))
        while True:
            if self.at("*"):
                self.next()
                base = ptr(base)
                if self.at("const"):
                    self.next()
                    from dataclasses import replace
                    base = replace(base, is_const=True)
            elif self.at("&&"):
                self.next()
                base = rref(base)
            elif self.at("&"):
                self.next()
                base = lref(base)
            else:
                break
        return base

    def parse_template_args(self) -> tuple:
        self.expect("<")
        args = []
        while True:
            t = self.peek()
            if t.kind == "number":
                self.next()
                args.append(int(t.text))
            elif t.kind == "ident" and t.text in self.int_params:
                self.next()
                args.append(t.text)
            elif self.is_type_start():
                args.append(self.parse_type())
            else:
                raise self.error("expected a template argument")
            if self.at(","):
                self.next()
                continue
            break
        self.expect(">")
        return tuple(args)

    # --- statements -------------------------------------------------------------------
    def parse_block(self) -> n.Block:
        loc = self.expect("{").loc
        stmts = []
        while not self.at("}"):
            stmts.append(self.parse_stmt())
        self.expect("}")
        return n.Block(tuple(stmts), loc=loc)

    def parse_stmt(self) -> n.Stmt:
        t = self.peek()
        if t.kind == "{":
            return self.parse_block()
        if t.kind == "if":
            self.next()
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            then = self.parse_stmt_as_block()
            els = None
            if self.at("else"):
                self.next()
                els = self.parse_stmt_as_block()
            return n.IfStmt(cond, then, els, loc=t.loc)
        if t.kind == "while":
            self.next()
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            return n.WhileStmt(cond, self.parse_stmt_as_block(), loc=t.loc)
        if t.kind == "for":
            self.next()
            self.expect("(")
            init = None if self.at(";") else self.parse_simple_stmt()
            self.expect(";")
            cond = None if self.at(";") else self.parse_expr()
            self.expect(";")
            step = None if self.at(")") else self.parse_simple_stmt()
            self.expect(")")
            return n.ForStmt(init, cond, step, self.parse_stmt_as_block(), loc=t.loc)
        if t.kind == "return":
            self.next()
            value = None if self.at(";") else self.parse_expr()
            self.expect(";")
            return n.ReturnStmt(value, loc=t.loc)
        if t.kind == "assert":
            self.next()
            self.expect("(")
            start = self.pos
            cond = self.parse_expr()
            text = token_join([tok.text for tok in self.toks[start:self.pos]])
            self.expect(")")
            self.expect(";")
            return n.AssertStmt(cond, text, loc=t.loc)
        if t.kind == "try":
            self.next()
            body = self.parse_block()
            handlers = []
            while self.at("catch"):
                hloc = self.next().loc
                self.expect("(")
                if self.at("..."):
                    self.next()
                    htype, var = None, ""
                else:
                    self.last_declarator_name = ""
                    htype = self.parse_type()
                    var = self.next().text if self.at("ident") else self.last_declarator_name
                self.expect(")")
                handlers.append(n.Handler(htype, var, self.parse_block(), loc=hloc))
            if not handlers:
                raise self.error("try block without catch handlers")
            return n.TryStmt(body, tuple(handlers), loc=t.loc)
        if t.kind == "throw":
            self.next()
            value = None if self.at(";") else self.parse_expr()
            self.expect(";")
            return n.ThrowStmt(value, loc=t.loc)
        if t.kind == "delete":
            self.next()
            is_array = False
            if self.at("["):
                self.next()
                self.expect("]")
                is_array = True
            target = self.parse_expr()
            self.expect(";")
            return n.DeleteStmt(target, is_array, loc=t.loc)
        stmt = self.parse_simple_stmt()
        self.expect(";")
        return stmt

    def parse_stmt_as_block(self) -> n.Block:
        s = self.parse_stmt()
        if isinstance(s, n.Block):
            return s
        return n.Block((s,), loc=s.loc)

    def parse_simple_stmt(self) -> n.Stmt:
        """Declaration, assignment, or expression; no trailing semicolon."""
        if self.is_type_start():
            return self.parse_decl_stmt()
        loc = self.peek().loc
        e = self.parse_expr()
        if self.at("="):
            self.next()
            rhs = self.parse_expr()
            return n.AssignStmt(e, rhs, loc=loc)
        return n.ExprStmt(e, loc=loc)

    def parse_decl_stmt(self) -> n.DeclStmt:
        loc = self.peek().loc
        ty = self.parse_type()
        name = self.expect("ident")
        if self.at("["):
            self.next()
            length = int(self.expect("number").text)
            self.expect("]")
            ty = array_t(ty, length)
        if self.at("="):
            self.next()
            return n.DeclStmt(name.text, ty, self.parse_expr(), "=", loc=loc)
        if self.at("("):
            self.next()
            args = []
            while not self.at(")"):
                args.append(self.parse_expr())
                if self.at(","):
                    self.next()
            self.expect(")")
            return n.DeclStmt(name.text, ty, tuple(args), "call", loc=loc)
        if self.at("{"):
            self.next()
            args = []
            while not self.at("}"):
                args.append(self.parse_expr())
                if self.at(","):
                    self.next()
            self.expect("}")
            return n.DeclStmt(name.text, ty, tuple(args), "brace", loc=loc)
        return n.DeclStmt(name.text, ty, None, "", loc=loc)

    # --- expressions ----------------------------------------------------------------------
    def parse_expr(self) -> n.Expr:
        return self.parse_or()

    def parse_or(self) -> n.Expr:
        e = self.parse_and()
        while self.at("||"):
            loc = self.next().loc
            e = n.Binary("||", e, self.parse_and(), loc=loc)
        return e

    def parse_and(self) -> n.Expr:
        e = self.parse_equality()
        while self.at("&&"):
            loc = self.next().loc
            e = n.Binary("&&", e, self.parse_equality(), loc=loc)
        return e

    def parse_equality(self) -> n.Expr:
        e = self.parse_relational()
        while self.peek().kind in ("==", "!="):
            op = self.next()
            e = n.Binary(op.kind, e, self.parse_relational(), loc=op.loc)
        return e

    def parse_relational(self) -> n.Expr:
        e = self.parse_additive()
        while self.peek().kind in ("<", ">", "<=", ">="):
            op = self.next()
            e = n.Binary(op.kind, e, self.parse_additive(), loc=op.loc)
        return e

    def parse_additive(self) -> n.Expr:
        e = self.parse_multiplicative()
        while self.peek().kind in ("+", "-"):
            op = self.next()
            e = n.Binary(op.kind, e, self.parse_multiplicative(), loc=op.loc)
        return e

    def parse_multiplicative(self) -> n.Expr:
        e = self.parse_unary()
        while self.at("*"):
            op = self.next()
            e = n.Binary("*", e, self.parse_unary(), loc=op.loc)
        if self.peek().kind in ("/", "%"):
            raise self.error("division is not supported in MiniCxx")
        return e

    def parse_unary(self) -> n.Expr:
        t = self.peek()
        if t.kind in ("-", "!", "*", "&"):
            self.next()
            return n.Unary(t.kind, self.parse_unary(), loc=t.loc)
        if t.kind in ("++", "--"):
            self.next()
            op = "+" if t.kind == "++" else "-"
            return n.IncDec(op, self.parse_unary(), prefix=True, loc=t.loc)
        return self.parse_postfix()

    def parse_postfix(self) -> n.Expr:
        e = self.parse_primary()
        while True:
            t = self.peek()
            if t.kind == ".":
                self.next()
                name = self.expect("ident")
                e = n.Member(e, name.text, arrow=False, loc=name.loc)
            elif t.kind == "->":
                self.next()
                name = self.expect("ident")
                e = n.Member(e, name.text, arrow=True, loc=name.loc)
            elif t.kind == "(":
                self.next()
                args = []
                while not self.at(")"):
                    args.append(self.parse_expr())
                    if self.at(","):
                        self.next()
                self.expect(")")
                e = n.Call(e, tuple(args), loc=t.loc)
            elif t.kind == "[":
                self.next()
                idx = self.parse_expr()
                self.expect("]")
                e = n.Index(e, idx, loc=t.loc)
            elif t.kind in ("++", "--"):
                self.next()
                op = "+" if t.kind == "++" else "-"
                e = n.IncDec(op, e, prefix=False, loc=t.loc)
            else:
                break
        return e

    def parse_primary(self) -> n.Expr:
        t = self.peek()
        if t.kind == "number":
            self.next()
            return n.IntLit(int(t.text), loc=t.loc)
        if t.kind == "charlit":
            self.next()
            return n.CharLit(t.text, loc=t.loc)
        if t.kind == "true":
            self.next()
            return n.BoolLit(True, loc=t.loc)
        if t.kind == "false":
            self.next()
            return n.BoolLit(False, loc=t.loc)
        if t.kind == "nullptr":
            self.next()
            return n.NullLit(loc=t.loc)
        if t.kind == "this":
            self.next()
            return n.This(loc=t.loc)
        if t.kind == "(":
            self.next()
            e = self.parse_expr()
            self.expect(")")
            return e
        if t.kind == "new":
            self.next()
            ty = self.parse_new_type()
            if self.at("["):
                self.next()
                count = self.parse_expr()
                self.expect("]")
                return n.NewExpr(ty, None, count, loc=t.loc)
            if self.at("("):
                self.next()
                args = []
                while not self.at(")"):
                    args.append(self.parse_expr())
                    if self.at(","):
                        self.next()
                self.expect(")")
                return n.NewExpr(ty, tuple(args), None, loc=t.loc)
            return n.NewExpr(ty, None, None, loc=t.loc)
        if t.kind == "ident" and t.text == "std" and self.at("::", 1):
            self.next()
            self.next()
            name = self.expect("ident")
            if name.text != "move":
                raise ParseError(f"std::{name.text} is not supported", name.loc)
            self.expect("(")
            arg = self.parse_expr()
            self.expect(")")
            return n.Move(arg, loc=t.loc)
        if t.kind == "ident":
            self.next()
            known_template = (t.text in self.func_templates
                              or t.text in self.class_templates)
            if known_template and self.at("<"):
                args = self.parse_template_args()
                return n.TemplateId(t.text, args, loc=t.loc)
            return n.NameRef(t.text, loc=t.loc)
        what = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"expected an expression, found {what}", t.loc)

    def parse_new_type(self) -> TypeRepr:
        """Element type after `new`; pointer suffixes allowed, arrays via []."""
        return self.parse_type()


def parse(tokens: list[Token], filename: str = "<input>", int_width: int = 32) -> n.Program:
    return Parser(tokens, filename, int_width).parse_program()


def parse_source(source: str, filename: str = "<input>", int_width: int = 32) -> n.Program:
    return parse(lex(source, filename), filename, int_width)
