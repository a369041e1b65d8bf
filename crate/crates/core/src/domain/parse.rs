use std::collections::{HashMap, HashSet};

use super::sexpr::{self, end_pos, error, Pos, Sexp};
use super::{
    DiagCode, Diagnostic, DomainDefinition, LiftedAtom, LiftedCondition, LiftedEffect, LiftedLiteral, OperatorSchema,
    ProblemDefinition, Term, TypeDef, ROOT_TYPE,
};
use crate::logic::{GroundAtom, PredicateSchema, MAX_ARITY};

type Diags = Vec<Diagnostic>;

/// A name with an optional `- type` annotation, as found in typed lists.
struct Typed<'a> {
    name: &'a str,
    name_pos: Pos,
    ty: &'a str,
    ty_pos: Pos,
}

fn typed_list<'a>(items: &'a [Sexp], diags: &mut Diags) -> Vec<Typed<'a>> {
    let mut out = Vec::new();
    let mut pending: Vec<(&str, Pos)> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let item = &items[i];
        match item.as_atom() {
            Some("-") => {
                let ty = items.get(i + 1);
                match ty.and_then(|t| t.as_atom().map(|a| (a, t.pos()))) {
                    Some((ty, ty_pos)) if ty != "-" => {
                        if pending.is_empty() {
                            diags.push(error(DiagCode::Syntax, item.pos(), "`-` with no names before it"));
                        }
                        for (name, name_pos) in pending.drain(..) {
                            out.push(Typed {
                                name,
                                name_pos,
                                ty,
                                ty_pos,
                            });
                        }
                        i += 2;
                        continue;
                    }
                    _ => {
                        let at = ty.map_or(item.pos(), |t| t.pos());
                        diags.push(error(DiagCode::Syntax, at, "expected a type name after `-`"));
                        pending.clear();
                        i += 2;
                        continue;
                    }
                }
            }
            Some(name) => pending.push((name, item.pos())),
            None => diags.push(error(DiagCode::Syntax, item.pos(), "expected a name, found a list")),
        }
        i += 1;
    }
    for (name, name_pos) in pending {
        out.push(Typed {
            name,
            name_pos,
            ty: ROOT_TYPE,
            ty_pos: name_pos,
        });
    }
    out
}

/// Splits a `(define (<kind> NAME) sections...)` form.
fn definition<'a>(src: &str, forms: &'a [Sexp], kind: &str, diags: &mut Diags) -> Option<(&'a str, &'a [Sexp])> {
    let Some(first) = forms.first() else {
        diags.push(error(
            DiagCode::Syntax,
            end_pos(src),
            format!("expected `(define ({kind} NAME) ...)`"),
        ));
        return None;
    };
    if let Some(extra) = forms.get(1) {
        diags.push(error(
            DiagCode::Syntax,
            extra.pos(),
            "unexpected form after the definition",
        ));
    }
    let items = match first.as_list() {
        Some(items) if items.first().is_some_and(|d| d.is_keyword("define")) => items,
        _ => {
            diags.push(error(DiagCode::Syntax, first.pos(), "expected `(define ...)`"));
            return None;
        }
    };
    let header = items.get(1).and_then(|h| h.as_list());
    let name = match header {
        Some([k, Sexp::Atom(name, _)]) if k.is_keyword(kind) => name.as_str(),
        _ => {
            let at = items.get(1).map_or(first.pos(), |h| h.pos());
            diags.push(error(DiagCode::Syntax, at, format!("expected `({kind} NAME)`")));
            return None;
        }
    };
    Some((name, &items[2..]))
}

/// Groups `(:keyword ...)` sections, reporting unknown or repeated ones.
fn sections<'a>(body: &'a [Sexp], known: &[&str], diags: &mut Diags) -> HashMap<String, Vec<(&'a [Sexp], Pos)>> {
    let mut out: HashMap<String, Vec<(&[Sexp], Pos)>> = HashMap::new();
    for sec in body {
        let Some(items) = sec.as_list() else {
            diags.push(error(DiagCode::Syntax, sec.pos(), "expected a `(:section ...)` list"));
            continue;
        };
        let Some(key) = items.first().and_then(|k| k.as_atom()) else {
            diags.push(error(DiagCode::Syntax, sec.pos(), "empty or malformed section"));
            continue;
        };
        let key = key.to_ascii_lowercase();
        if !known.contains(&key.as_str()) {
            diags.push(error(
                DiagCode::UnknownSection,
                items[0].pos(),
                format!("unknown section `{}`", items[0].as_atom().unwrap_or_default()),
            ));
            continue;
        }
        out.entry(key).or_default().push((&items[1..], sec.pos()));
    }
    for (key, list) in &out {
        if key != ":action" && list.len() > 1 {
            diags.push(error(
                DiagCode::DuplicateName,
                list[1].1,
                format!("section `{key}` repeated"),
            ));
        }
    }
    out
}

/// Symbol table for argument checking.
struct Scope<'a> {
    domain: &'a DomainDefinition,
    /// variable -> type (operator parameters)
    vars: HashMap<&'a str, &'a str>,
    /// object or constant -> type
    objects: HashMap<&'a str, &'a str>,
}

impl<'a> Scope<'a> {
    fn atom(&self, sx: &Sexp, allow_vars: bool, diags: &mut Diags) -> Option<(LiftedAtom, Pos)> {
        let items = match sx.as_list() {
            Some(items) if !items.is_empty() => items,
            _ => {
                diags.push(error(
                    DiagCode::Syntax,
                    sx.pos(),
                    "expected an atom `(predicate args...)`",
                ));
                return None;
            }
        };
        let Some(pname) = items[0].as_atom() else {
            diags.push(error(DiagCode::Syntax, items[0].pos(), "expected a predicate name"));
            return None;
        };
        let Some(schema) = self.domain.predicate(pname) else {
            diags.push(error(
                DiagCode::UnknownPredicate,
                items[0].pos(),
                format!("predicate `{pname}` is not declared"),
            ));
            return None;
        };
        let args = &items[1..];
        if args.len() != schema.arity() {
            diags.push(error(
                DiagCode::ArityMismatch,
                sx.pos(),
                format!("`{pname}` takes {} argument(s), found {}", schema.arity(), args.len()),
            ));
            return None;
        }
        let mut terms = Vec::with_capacity(args.len());
        let mut ok = true;
        for (arg, want) in args.iter().zip(&schema.param_types) {
            let Some(text) = arg.as_atom() else {
                diags.push(error(DiagCode::Syntax, arg.pos(), "expected a symbol argument"));
                ok = false;
                continue;
            };
            let (term, ty) = if let Some(var) = text.strip_prefix('?') {
                if !allow_vars {
                    diags.push(error(
                        DiagCode::UnboundVariable,
                        arg.pos(),
                        format!("variable `{text}` not allowed here"),
                    ));
                    ok = false;
                    continue;
                }
                match self.vars.get(var) {
                    Some(ty) => (Term::Var(var.to_string()), *ty),
                    None => {
                        diags.push(error(
                            DiagCode::UnboundVariable,
                            arg.pos(),
                            format!("variable `{text}` is not a parameter"),
                        ));
                        ok = false;
                        continue;
                    }
                }
            } else {
                match self.objects.get(text) {
                    Some(ty) => (Term::Const(text.to_string()), *ty),
                    None => {
                        diags.push(error(
                            DiagCode::UnknownObject,
                            arg.pos(),
                            format!("object `{text}` is not declared"),
                        ));
                        ok = false;
                        continue;
                    }
                }
            };
            if !self.domain.is_subtype(ty, want) {
                diags.push(error(
                    DiagCode::TypeMismatch,
                    arg.pos(),
                    format!("`{text}` has type `{ty}`, `{pname}` expects `{want}`"),
                ));
                ok = false;
            }
            terms.push(term);
        }
        ok.then(|| {
            (
                LiftedAtom {
                    predicate: pname.to_string(),
                    args: terms,
                },
                sx.pos(),
            )
        })
    }

    /// Flattens `(and ...)`/`(not ...)`/atom forms into literals.
    fn literals(&self, sx: &Sexp, allow_vars: bool, diags: &mut Diags, out: &mut Vec<(LiftedLiteral, Pos)>) {
        let Some(items) = sx.as_list() else {
            diags.push(error(DiagCode::Syntax, sx.pos(), "expected a condition list"));
            return;
        };
        match items.first() {
            None => {}
            Some(head) if head.is_keyword("and") => {
                for sub in &items[1..] {
                    self.literals(sub, allow_vars, diags, out);
                }
            }
            Some(head) if head.is_keyword("not") => {
                if items.len() != 2 {
                    diags.push(error(DiagCode::Syntax, sx.pos(), "`not` takes exactly one atom"));
                    return;
                }
                if let Some((atom, pos)) = self.atom(&items[1], allow_vars, diags) {
                    out.push((LiftedLiteral { atom, positive: false }, pos));
                }
            }
            Some(_) => {
                if let Some((atom, pos)) = self.atom(sx, allow_vars, diags) {
                    out.push((LiftedLiteral { atom, positive: true }, pos));
                }
            }
        }
    }

    fn condition(&self, sx: &Sexp, allow_vars: bool, diags: &mut Diags) -> LiftedCondition {
        let mut lits = Vec::new();
        self.literals(sx, allow_vars, diags, &mut lits);
        let mut seen: HashMap<&LiftedAtom, bool> = HashMap::new();
        let mut out = Vec::new();
        for (lit, pos) in &lits {
            match seen.get(&lit.atom) {
                Some(&pol) if pol != lit.positive => diags.push(error(
                    DiagCode::Contradiction,
                    *pos,
                    format!("`{}` required both true and false", lit.atom.predicate),
                )),
                Some(_) => {}
                None => {
                    seen.insert(&lit.atom, lit.positive);
                    out.push(lit.clone());
                }
            }
        }
        LiftedCondition { literals: out }
    }

    fn effect(&self, sx: &Sexp, diags: &mut Diags) -> LiftedEffect {
        let mut lits = Vec::new();
        self.literals(sx, true, diags, &mut lits);
        let mut eff = LiftedEffect::default();
        for (lit, pos) in lits {
            let (mine, other) = if lit.positive {
                (&mut eff.adds, &eff.deletes)
            } else {
                (&mut eff.deletes, &eff.adds)
            };
            if other.contains(&lit.atom) {
                diags.push(error(
                    DiagCode::EffectConflict,
                    pos,
                    format!("`{}` is both added and deleted", lit.atom.predicate),
                ));
            } else if !mine.contains(&lit.atom) {
                mine.push(lit.atom);
            }
        }
        eff
    }
}

const DOMAIN_SECTIONS: &[&str] = &[":requirements", ":types", ":constants", ":predicates", ":action"];

/// Parses and validates a domain. Never panics; malformed input yields
/// positioned diagnostics.
pub fn parse_domain(src: &str) -> Result<DomainDefinition, Vec<Diagnostic>> {
    let forms = sexpr::read(src)?;
    let mut diags = Vec::new();
    let Some((name, body)) = definition(src, &forms, "domain", &mut diags) else {
        return Err(diags);
    };
    let secs = sections(body, DOMAIN_SECTIONS, &mut diags);
    let first = |key: &str| secs.get(key).and_then(|v| v.first()).map(|(items, _)| *items);

    let mut dom = DomainDefinition {
        name: name.to_string(),
        types: Vec::new(),
        constants: Vec::new(),
        predicates: Vec::new(),
        operators: Vec::new(),
    };

    // types
    let mut type_pos: HashMap<String, Pos> = HashMap::new();
    if let Some(items) = first(":types") {
        for t in typed_list(items, &mut diags) {
            if t.name == ROOT_TYPE || type_pos.contains_key(t.name) {
                diags.push(error(
                    DiagCode::DuplicateName,
                    t.name_pos,
                    format!("type `{}` declared twice", t.name),
                ));
                continue;
            }
            type_pos.insert(t.name.to_string(), t.ty_pos);
            dom.types.push(TypeDef {
                name: t.name.to_string(),
                parent: t.ty.to_string(),
            });
        }
    }
    let mut bad_types = HashSet::new();
    for t in &dom.types {
        if !dom.has_type(&t.parent) {
            diags.push(error(
                DiagCode::UndeclaredType,
                type_pos[&t.name],
                format!("type `{}` is not declared", t.parent),
            ));
            bad_types.insert(t.name.clone());
        }
    }
    for t in &dom.types {
        if !bad_types.contains(&t.name) && !dom.is_subtype(&t.name, ROOT_TYPE) {
            diags.push(error(
                DiagCode::Syntax,
                type_pos[&t.name],
                format!("type `{}` is part of a cycle", t.name),
            ));
        }
    }

    let check_type = |dom: &DomainDefinition, ty: &str, pos: Pos, diags: &mut Diags| -> bool {
        if dom.has_type(ty) {
            true
        } else {
            diags.push(error(
                DiagCode::UndeclaredType,
                pos,
                format!("type `{ty}` is not declared"),
            ));
            false
        }
    };

    // constants
    if let Some(items) = first(":constants") {
        for c in typed_list(items, &mut diags) {
            if dom.constants.iter().any(|(n, _)| n == c.name) {
                diags.push(error(
                    DiagCode::DuplicateName,
                    c.name_pos,
                    format!("constant `{}` declared twice", c.name),
                ));
            } else if check_type(&dom, c.ty, c.ty_pos, &mut diags) {
                dom.constants.push((c.name.to_string(), c.ty.to_string()));
            }
        }
    }

    // predicates
    if let Some(items) = first(":predicates") {
        for p in items {
            let Some([head, params @ ..]) = p.as_list() else {
                diags.push(error(DiagCode::Syntax, p.pos(), "expected `(predicate ?x - type ...)`"));
                continue;
            };
            let Some(pname) = head.as_atom() else {
                diags.push(error(DiagCode::Syntax, head.pos(), "expected a predicate name"));
                continue;
            };
            let mut types = Vec::new();
            for t in typed_list(params, &mut diags) {
                if !t.name.starts_with('?') {
                    diags.push(error(
                        DiagCode::Syntax,
                        t.name_pos,
                        "predicate parameters must start with `?`",
                    ));
                }
                check_type(&dom, t.ty, t.ty_pos, &mut diags);
                types.push(t.ty.to_string());
            }
            if types.len() > MAX_ARITY {
                diags.push(error(
                    DiagCode::ArityTooLarge,
                    p.pos(),
                    format!("`{pname}` has {} parameters, at most {MAX_ARITY} allowed", types.len()),
                ));
            }
            if dom.predicate(pname).is_some() {
                diags.push(error(
                    DiagCode::DuplicateName,
                    head.pos(),
                    format!("predicate `{pname}` declared twice"),
                ));
                continue;
            }
            dom.predicates.push(PredicateSchema::new(pname, types));
        }
    }

    // actions
    let objects: HashMap<&str, &str> = dom.constants.iter().map(|(n, t)| (n.as_str(), t.as_str())).collect();
    let mut operators = Vec::new();
    for (items, pos) in secs.get(":action").into_iter().flatten() {
        if let Some(op) = parse_action(&dom, &objects, items, *pos, &mut diags) {
            if operators.iter().any(|o: &OperatorSchema| o.name == op.name) {
                diags.push(error(
                    DiagCode::DuplicateName,
                    *pos,
                    format!("operator `{}` declared twice", op.name),
                ));
            } else {
                operators.push(op);
            }
        }
    }
    dom.operators = operators;

    if diags.is_empty() {
        Ok(dom)
    } else {
        Err(diags)
    }
}

const ACTION_KEYS: &[&str] = &[":parameters", ":precondition", ":runcondition", ":effect", ":binding"];

fn parse_action(
    dom: &DomainDefinition,
    objects: &HashMap<&str, &str>,
    items: &[Sexp],
    pos: Pos,
    diags: &mut Diags,
) -> Option<OperatorSchema> {
    let Some(name) = items.first().and_then(|n| n.as_atom()) else {
        diags.push(error(DiagCode::Syntax, pos, "expected an action name"));
        return None;
    };
    let mut fields: HashMap<String, &Sexp> = HashMap::new();
    let mut rest = &items[1..];
    while let [key, tail @ ..] = rest {
        let Some(k) = key.as_atom().filter(|k| k.starts_with(':')) else {
            diags.push(error(DiagCode::Syntax, key.pos(), "expected an action keyword"));
            return None;
        };
        let k = k.to_ascii_lowercase();
        if !ACTION_KEYS.contains(&k.as_str()) {
            diags.push(error(
                DiagCode::UnknownSection,
                key.pos(),
                format!("unknown action keyword `{k}`"),
            ));
            return None;
        }
        let Some((value, tail)) = tail.split_first() else {
            diags.push(error(DiagCode::Syntax, key.pos(), format!("`{k}` has no value")));
            return None;
        };
        if fields.insert(k.clone(), value).is_some() {
            diags.push(error(DiagCode::DuplicateName, key.pos(), format!("`{k}` given twice")));
        }
        rest = tail;
    }

    let mut params: Vec<(String, String)> = Vec::new();
    if let Some(p) = fields.get(":parameters") {
        match p.as_list() {
            Some(list) => {
                for t in typed_list(list, diags) {
                    let Some(var) = t.name.strip_prefix('?') else {
                        diags.push(error(DiagCode::Syntax, t.name_pos, "parameters must start with `?`"));
                        continue;
                    };
                    if !dom.has_type(t.ty) {
                        diags.push(error(
                            DiagCode::UndeclaredType,
                            t.ty_pos,
                            format!("type `{}` is not declared", t.ty),
                        ));
                        continue;
                    }
                    if params.iter().any(|(v, _)| v == var) {
                        diags.push(error(
                            DiagCode::DuplicateName,
                            t.name_pos,
                            format!("parameter `{}` repeated", t.name),
                        ));
                        continue;
                    }
                    params.push((var.to_string(), t.ty.to_string()));
                }
            }
            None => diags.push(error(DiagCode::Syntax, p.pos(), "`:parameters` expects a list")),
        }
    }

    let scope = Scope {
        domain: dom,
        vars: params.iter().map(|(v, t)| (v.as_str(), t.as_str())).collect(),
        objects: objects.clone(),
    };
    let pre = fields
        .get(":precondition")
        .map(|s| scope.condition(s, true, diags))
        .unwrap_or_default();
    let run = match fields.get(":runcondition") {
        Some(s) => scope.condition(s, true, diags),
        None => pre.clone(),
    };
    let eff = fields
        .get(":effect")
        .map(|s| scope.effect(s, diags))
        .unwrap_or_default();
    let binding = match fields.get(":binding") {
        Some(Sexp::Atom(b, _)) => b.clone(),
        Some(other) => {
            diags.push(error(
                DiagCode::Syntax,
                other.pos(),
                "`:binding` expects a primitive name",
            ));
            name.to_string()
        }
        None => name.to_string(),
    };
    Some(OperatorSchema {
        name: name.to_string(),
        params,
        pre,
        run,
        eff,
        primitive_binding: binding,
    })
}

const PROBLEM_SECTIONS: &[&str] = &[":domain", ":requirements", ":objects", ":init", ":goal"];

fn ground_atom(atom: LiftedAtom) -> GroundAtom {
    GroundAtom {
        predicate: atom.predicate,
        args: atom
            .args
            .into_iter()
            .map(|t| match t {
                Term::Const(c) | Term::Var(c) => c,
            })
            .collect(),
    }
}

/// Parses a problem against an already validated domain.
pub fn parse_problem(src: &str, domain: &DomainDefinition) -> Result<ProblemDefinition, Vec<Diagnostic>> {
    let forms = sexpr::read(src)?;
    let mut diags = Vec::new();
    let Some((name, body)) = definition(src, &forms, "problem", &mut diags) else {
        return Err(diags);
    };
    let secs = sections(body, PROBLEM_SECTIONS, &mut diags);
    let first = |key: &str| secs.get(key).and_then(|v| v.first()).copied();

    let domain_name = match first(":domain") {
        Some(([Sexp::Atom(d, dpos)], _)) => {
            if d != &domain.name {
                diags.push(error(
                    DiagCode::DomainMismatch,
                    *dpos,
                    format!("problem is for domain `{d}`, loaded domain is `{}`", domain.name),
                ));
            }
            d.clone()
        }
        Some((_, pos)) => {
            diags.push(error(DiagCode::Syntax, pos, "expected `(:domain NAME)`"));
            String::new()
        }
        None => {
            let at = forms.first().map_or(end_pos(src), |f| f.pos());
            diags.push(error(DiagCode::Syntax, at, "missing `(:domain NAME)`"));
            String::new()
        }
    };

    let mut objects: Vec<(String, String)> = Vec::new();
    if let Some((items, _)) = first(":objects") {
        for o in typed_list(items, &mut diags) {
            if !domain.has_type(o.ty) {
                diags.push(error(
                    DiagCode::UndeclaredType,
                    o.ty_pos,
                    format!("unknown object type `{}`", o.ty),
                ));
                continue;
            }
            let dup = objects.iter().any(|(n, _)| n == o.name) || domain.constants.iter().any(|(n, _)| n == o.name);
            if dup {
                diags.push(error(
                    DiagCode::DuplicateName,
                    o.name_pos,
                    format!("object `{}` declared twice", o.name),
                ));
                continue;
            }
            objects.push((o.name.to_string(), o.ty.to_string()));
        }
    }

    let scope = Scope {
        domain,
        vars: HashMap::new(),
        objects: objects
            .iter()
            .chain(&domain.constants)
            .map(|(n, t)| (n.as_str(), t.as_str()))
            .collect(),
    };

    let mut init: Vec<GroundAtom> = Vec::new();
    if let Some((items, _)) = first(":init") {
        for item in items {
            if item
                .as_list()
                .and_then(|l| l.first())
                .is_some_and(|h| h.is_keyword("not"))
            {
                diags.push(error(
                    DiagCode::Syntax,
                    item.pos(),
                    "negative atoms are implicit in `:init`",
                ));
                continue;
            }
            if let Some((atom, _)) = scope.atom(item, false, &mut diags) {
                let atom = ground_atom(atom);
                if !init.contains(&atom) {
                    init.push(atom);
                }
            }
        }
    }

    let goal = match first(":goal") {
        None | Some(([], _)) => Vec::new(),
        Some(([cond], _)) => scope
            .condition(cond, false, &mut diags)
            .literals
            .into_iter()
            .map(|l| (ground_atom(l.atom), l.positive))
            .collect(),
        Some((more, _)) => {
            diags.push(error(
                DiagCode::Syntax,
                more[1].pos(),
                "`:goal` takes a single condition",
            ));
            Vec::new()
        }
    };

    if diags.is_empty() {
        Ok(ProblemDefinition {
            name: name.to_string(),
            domain_name,
            objects,
            init,
            goal,
        })
    } else {
        Err(diags)
    }
}
