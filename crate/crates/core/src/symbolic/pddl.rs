//! Parser for the STRIPS + typing subset of PDDL.
//!
//! Accepted constructs: `:requirements` limited to `:strips` and `:typing`,
//! `:types`, `:constants`, `:predicates`, `:action` with `:parameters`,
//! conjunctive `:precondition` of positive atoms and conjunctive `:effect`
//! made of atoms and `(not atom)`; problems with `:domain`, `:objects`,
//! `:init` and a conjunctive `:goal`. Identifiers are case-insensitive and
//! normalised to lower case. `;` starts a line comment.

use alloc::borrow::ToOwned;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// Line/column of a token, both 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("{pos}: unsupported requirement `{name}`")]
    UnsupportedRequirement { pos: Pos, name: String },
    #[error("{pos}: undeclared predicate `{name}`")]
    UndeclaredPredicate { pos: Pos, name: String },
    #[error("{pos}: undeclared type `{name}`")]
    UndeclaredType { pos: Pos, name: String },
    #[error("{pos}: undeclared object or parameter `{name}`")]
    UndeclaredObject { pos: Pos, name: String },
    #[error("{pos}: predicate `{name}` takes {expected} argument(s), found {found}")]
    ArityMismatch {
        pos: Pos,
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("problem refers to domain `{found}` but the domain is `{expected}`")]
    DomainMismatch { expected: String, found: String },
}

/// Parser behaviour switches.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Reject atoms whose predicate is not declared in `:predicates`.
    /// When false, such predicates are declared on first use with
    /// `object`-typed parameters.
    pub strict: bool,
}

impl ParseOptions {
    pub const STRICT: Self = Self { strict: true };
    pub const LENIENT: Self = Self { strict: false };
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedParam {
    pub name: String,
    pub ty: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Predicate {
    pub name: String,
    pub params: Vec<TypedParam>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Var(String),
    Const(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<TypedParam>,
    pub precondition: Vec<Atom>,
    pub add: Vec<Atom>,
    pub del: Vec<Atom>,
}

/// A ground atom: predicate name plus object arguments.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl GroundAtom {
    /// Canonical text, e.g. `holding red` or `has-key`.
    pub fn text(&self) -> String {
        let mut out = self.predicate.clone();
        for a in &self.args {
            out.push(' ');
            out.push_str(a);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeDecl {
    pub name: String,
    pub parent: String,
}

/// The pre-grounding form of a planning task.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedTask {
    pub domain_name: String,
    pub problem_name: String,
    pub types: Vec<TypeDecl>,
    /// Objects and domain constants with their types, in declaration order.
    pub objects: Vec<(String, String)>,
    pub predicates: Vec<Predicate>,
    pub action_schemas: Vec<ActionSchema>,
    pub init: Vec<GroundAtom>,
    pub goal: Vec<GroundAtom>,
}

impl LiftedTask {
    pub fn predicate(&self, name: &str) -> Option<&Predicate> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn is_subtype(&self, ty: &str, ancestor: &str) -> bool {
        let mut cur = ty;
        // The type graph is a forest rooted at `object`; cap the walk to
        // guard against cycles in malformed input.
        for _ in 0..=self.types.len() + 1 {
            if cur == ancestor {
                return true;
            }
            match self.types.iter().find(|t| t.name == cur) {
                Some(t) if t.parent != cur => cur = &t.parent,
                _ => return false,
            }
        }
        false
    }
}

// ---------------------------------------------------------------------------
// s-expressions

#[derive(Clone, Debug)]
enum Sexp {
    Sym(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    fn pos(&self) -> Pos {
        match self {
            Sexp::Sym(_, p) | Sexp::List(_, p) => *p,
        }
    }

    fn sym(&self) -> Option<&str> {
        match self {
            Sexp::Sym(s, _) => Some(s),
            Sexp::List(..) => None,
        }
    }

    fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            Sexp::Sym(..) => None,
        }
    }
}

fn syntax(pos: Pos, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        pos,
        msg: msg.into(),
    }
}

fn read_sexp(text: &str) -> Result<Sexp, ParseError> {
    let mut stack: Vec<(Vec<Sexp>, Pos)> = Vec::new();
    let mut top: Option<Sexp> = None;
    let mut line = 1;
    let mut col = 0;
    let mut chars = text.chars().peekable();
    let mut sym = String::new();
    let mut sym_pos = Pos::default();

    fn flush(
        sym: &mut String,
        pos: Pos,
        stack: &mut [(Vec<Sexp>, Pos)],
    ) -> Result<(), ParseError> {
        if sym.is_empty() {
            return Ok(());
        }
        match stack.last_mut() {
            Some((items, _)) => {
                items.push(Sexp::Sym(sym.to_lowercase(), pos));
                sym.clear();
                Ok(())
            }
            None => Err(syntax(pos, format!("unexpected token `{sym}` outside parentheses"))),
        }
    }

    while let Some(c) = chars.next() {
        col += 1;
        let here = Pos { line, col };
        match c {
            '\n' => {
                flush(&mut sym, sym_pos, &mut stack)?;
                line += 1;
                col = 0;
            }
            ';' => {
                flush(&mut sym, sym_pos, &mut stack)?;
                while let Some(&n) = chars.peek() {
                    if n == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '(' => {
                flush(&mut sym, sym_pos, &mut stack)?;
                if top.is_some() && stack.is_empty() {
                    return Err(syntax(here, "trailing content after the top-level form"));
                }
                stack.push((Vec::new(), here));
            }
            ')' => {
                flush(&mut sym, sym_pos, &mut stack)?;
                let (items, pos) = stack
                    .pop()
                    .ok_or_else(|| syntax(here, "unbalanced `)`"))?;
                let node = Sexp::List(items, pos);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(node),
                    None => top = Some(node),
                }
            }
            c if c.is_whitespace() => flush(&mut sym, sym_pos, &mut stack)?,
            c => {
                if sym.is_empty() {
                    sym_pos = here;
                }
                sym.push(c);
            }
        }
    }
    flush(&mut sym, sym_pos, &mut stack)?;
    if let Some((_, pos)) = stack.last() {
        return Err(syntax(*pos, "unclosed `(`"));
    }
    top.ok_or_else(|| syntax(Pos { line, col }, "empty input"))
}

// ---------------------------------------------------------------------------
// domain / problem structure

struct DomainParts {
    name: String,
    types: Vec<TypeDecl>,
    constants: Vec<(String, String, Pos)>,
    predicates: Vec<Predicate>,
    actions: Vec<RawAction>,
}

struct RawAction {
    name: String,
    params: Vec<(TypedParam, Pos)>,
    precondition: Vec<RawAtom>,
    add: Vec<RawAtom>,
    del: Vec<RawAtom>,
}

#[derive(Clone)]
struct RawAtom {
    predicate: String,
    args: Vec<(String, Pos)>,
    pos: Pos,
}

struct ProblemParts {
    name: String,
    domain: String,
    objects: Vec<(String, String, Pos)>,
    init: Vec<RawAtom>,
    goal: Vec<RawAtom>,
}

fn expect_define<'a>(sexp: &'a Sexp, kind: &str) -> Result<(String, &'a [Sexp]), ParseError> {
    let items = sexp
        .list()
        .ok_or_else(|| syntax(sexp.pos(), "expected `(define ...)`"))?;
    if items.first().and_then(Sexp::sym) != Some("define") {
        return Err(syntax(sexp.pos(), "expected `define`"));
    }
    let header = items
        .get(1)
        .and_then(Sexp::list)
        .ok_or_else(|| syntax(sexp.pos(), format!("expected `({kind} <name>)`")))?;
    match header {
        [Sexp::Sym(k, _), Sexp::Sym(name, _)] if k == kind => Ok((name.clone(), &items[2..])),
        _ => Err(syntax(items[1].pos(), format!("expected `({kind} <name>)`"))),
    }
}

/// Parses a typed list such as `a b - key c` into (name, type, pos) triples.
fn typed_list(items: &[Sexp]) -> Result<Vec<(String, String, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut pending: Vec<(String, Pos)> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let s = items[i]
            .sym()
            .ok_or_else(|| syntax(items[i].pos(), "expected a name in typed list"))?;
        if s == "-" {
            let ty = items
                .get(i + 1)
                .and_then(Sexp::sym)
                .ok_or_else(|| syntax(items[i].pos(), "expected a type after `-`"))?;
            if pending.is_empty() {
                return Err(syntax(items[i].pos(), "`-` without preceding names"));
            }
            for (n, p) in pending.drain(..) {
                out.push((n, ty.to_owned(), p));
            }
            i += 2;
        } else {
            pending.push((s.to_owned(), items[i].pos()));
            i += 1;
        }
    }
    for (n, p) in pending {
        out.push((n, "object".to_owned(), p));
    }
    Ok(out)
}

fn raw_atom(sexp: &Sexp) -> Result<RawAtom, ParseError> {
    let items = sexp
        .list()
        .ok_or_else(|| syntax(sexp.pos(), "expected an atom `(pred args...)`"))?;
    let (head, rest) = items
        .split_first()
        .ok_or_else(|| syntax(sexp.pos(), "empty atom"))?;
    let predicate = head
        .sym()
        .ok_or_else(|| syntax(head.pos(), "expected a predicate name"))?;
    if matches!(predicate, "and" | "not" | "or" | "imply" | "forall" | "exists" | "when") {
        return Err(syntax(head.pos(), format!("`{predicate}` is not allowed here")));
    }
    let args = rest
        .iter()
        .map(|a| {
            a.sym()
                .map(|s| (s.to_owned(), a.pos()))
                .ok_or_else(|| syntax(a.pos(), "nested terms are not supported"))
        })
        .collect::<Result<_, _>>()?;
    Ok(RawAtom {
        predicate: predicate.to_owned(),
        args,
        pos: sexp.pos(),
    })
}

/// A conjunction of atoms: `()`, `(and ...)` or a single atom.
fn conjunction(sexp: &Sexp) -> Result<Vec<RawAtom>, ParseError> {
    let items = sexp
        .list()
        .ok_or_else(|| syntax(sexp.pos(), "expected a formula"))?;
    match items.first().and_then(Sexp::sym) {
        None if items.is_empty() => Ok(Vec::new()),
        Some("and") => items[1..].iter().map(raw_atom).collect(),
        Some("not") => Err(syntax(sexp.pos(), "negative preconditions are not supported")),
        Some("or") | Some("imply") | Some("forall") | Some("exists") => Err(syntax(
            sexp.pos(),
            "only conjunctive formulas are supported",
        )),
        _ => Ok(alloc::vec![raw_atom(sexp)?]),
    }
}

/// An effect: conjunction of atoms and `(not atom)`.
fn effect(sexp: &Sexp) -> Result<(Vec<RawAtom>, Vec<RawAtom>), ParseError> {
    let items = sexp
        .list()
        .ok_or_else(|| syntax(sexp.pos(), "expected an effect"))?;
    let literals: &[Sexp] = match items.first().and_then(Sexp::sym) {
        None if items.is_empty() => &[],
        Some("and") => &items[1..],
        _ => core::slice::from_ref(sexp),
    };
    let mut add = Vec::new();
    let mut del = Vec::new();
    for lit in literals {
        let parts = lit
            .list()
            .ok_or_else(|| syntax(lit.pos(), "expected an effect literal"))?;
        match parts.first().and_then(Sexp::sym) {
            Some("not") => {
                if parts.len() != 2 {
                    return Err(syntax(lit.pos(), "`not` takes exactly one atom"));
                }
                del.push(raw_atom(&parts[1])?);
            }
            Some("when") | Some("forall") => {
                return Err(syntax(lit.pos(), "conditional/quantified effects are not supported"))
            }
            _ => add.push(raw_atom(lit)?),
        }
    }
    Ok((add, del))
}

fn parse_domain(sexp: &Sexp) -> Result<DomainParts, ParseError> {
    let (name, sections) = expect_define(sexp, "domain")?;
    let mut parts = DomainParts {
        name,
        types: Vec::new(),
        constants: Vec::new(),
        predicates: Vec::new(),
        actions: Vec::new(),
    };
    for section in sections {
        let items = section
            .list()
            .ok_or_else(|| syntax(section.pos(), "expected a section"))?;
        let key = items
            .first()
            .and_then(Sexp::sym)
            .ok_or_else(|| syntax(section.pos(), "expected a section keyword"))?;
        match key {
            ":requirements" => {
                for r in &items[1..] {
                    let name = r
                        .sym()
                        .ok_or_else(|| syntax(r.pos(), "expected a requirement flag"))?;
                    if name != ":strips" && name != ":typing" {
                        return Err(ParseError::UnsupportedRequirement {
                            pos: r.pos(),
                            name: name.to_owned(),
                        });
                    }
                }
            }
            ":types" => {
                for (n, parent, _) in typed_list(&items[1..])? {
                    parts.types.push(TypeDecl { name: n, parent });
                }
            }
            ":constants" => parts.constants.extend(typed_list(&items[1..])?),
            ":predicates" => {
                for p in &items[1..] {
                    let decl = p
                        .list()
                        .ok_or_else(|| syntax(p.pos(), "expected a predicate declaration"))?;
                    let (head, rest) = decl
                        .split_first()
                        .ok_or_else(|| syntax(p.pos(), "empty predicate declaration"))?;
                    let pname = head
                        .sym()
                        .ok_or_else(|| syntax(head.pos(), "expected a predicate name"))?;
                    let params = typed_list(rest)?
                        .into_iter()
                        .map(|(name, ty, _)| TypedParam { name, ty })
                        .collect();
                    parts.predicates.push(Predicate {
                        name: pname.to_owned(),
                        params,
                    });
                }
            }
            ":action" => parts.actions.push(parse_action(items)?),
            other => {
                return Err(syntax(
                    items[0].pos(),
                    format!("unsupported domain section `{other}`"),
                ))
            }
        }
    }
    Ok(parts)
}

fn parse_action(items: &[Sexp]) -> Result<RawAction, ParseError> {
    let name = items
        .get(1)
        .and_then(Sexp::sym)
        .ok_or_else(|| syntax(items[0].pos(), "expected an action name"))?
        .to_owned();
    let mut action = RawAction {
        name,
        params: Vec::new(),
        precondition: Vec::new(),
        add: Vec::new(),
        del: Vec::new(),
    };
    let mut i = 2;
    while i < items.len() {
        let key = items[i]
            .sym()
            .ok_or_else(|| syntax(items[i].pos(), "expected an action keyword"))?;
        let value = items
            .get(i + 1)
            .ok_or_else(|| syntax(items[i].pos(), format!("missing value for `{key}`")))?;
        match key {
            ":parameters" => {
                let list = value
                    .list()
                    .ok_or_else(|| syntax(value.pos(), "expected a parameter list"))?;
                for (n, ty, p) in typed_list(list)? {
                    if !n.starts_with('?') {
                        return Err(syntax(p, format!("parameter `{n}` must start with `?`")));
                    }
                    action.params.push((TypedParam { name: n, ty }, p));
                }
            }
            ":precondition" => action.precondition = conjunction(value)?,
            ":effect" => {
                let (add, del) = effect(value)?;
                action.add = add;
                action.del = del;
            }
            other => {
                return Err(syntax(
                    items[i].pos(),
                    format!("unsupported action keyword `{other}`"),
                ))
            }
        }
        i += 2;
    }
    Ok(action)
}

fn parse_problem(sexp: &Sexp) -> Result<ProblemParts, ParseError> {
    let (name, sections) = expect_define(sexp, "problem")?;
    let mut parts = ProblemParts {
        name,
        domain: String::new(),
        objects: Vec::new(),
        init: Vec::new(),
        goal: Vec::new(),
    };
    for section in sections {
        let items = section
            .list()
            .ok_or_else(|| syntax(section.pos(), "expected a section"))?;
        let key = items
            .first()
            .and_then(Sexp::sym)
            .ok_or_else(|| syntax(section.pos(), "expected a section keyword"))?;
        match key {
            ":domain" => {
                parts.domain = items
                    .get(1)
                    .and_then(Sexp::sym)
                    .ok_or_else(|| syntax(section.pos(), "expected a domain name"))?
                    .to_owned();
            }
            ":objects" => parts.objects.extend(typed_list(&items[1..])?),
            ":init" => {
                for a in &items[1..] {
                    parts.init.push(raw_atom(a)?);
                }
            }
            ":goal" => {
                let g = items
                    .get(1)
                    .ok_or_else(|| syntax(section.pos(), "empty goal"))?;
                parts.goal = conjunction(g)?;
            }
            other => {
                return Err(syntax(
                    items[0].pos(),
                    format!("unsupported problem section `{other}`"),
                ))
            }
        }
    }
    Ok(parts)
}

// ---------------------------------------------------------------------------
// validation

struct Checker {
    strict: bool,
    predicates: Vec<Predicate>,
}

impl Checker {
    fn check_atom(&mut self, atom: &RawAtom) -> Result<(), ParseError> {
        match self.predicates.iter().find(|p| p.name == atom.predicate) {
            Some(p) if p.params.len() != atom.args.len() => Err(ParseError::ArityMismatch {
                pos: atom.pos,
                name: atom.predicate.clone(),
                expected: p.params.len(),
                found: atom.args.len(),
            }),
            Some(_) => Ok(()),
            None if self.strict => Err(ParseError::UndeclaredPredicate {
                pos: atom.pos,
                name: atom.predicate.clone(),
            }),
            None => {
                let params = (0..atom.args.len())
                    .map(|i| TypedParam {
                        name: format!("?a{i}"),
                        ty: "object".to_owned(),
                    })
                    .collect();
                self.predicates.push(Predicate {
                    name: atom.predicate.clone(),
                    params,
                });
                Ok(())
            }
        }
    }
}

fn check_type(types: &[TypeDecl], ty: &str, pos: Pos) -> Result<(), ParseError> {
    if ty == "object" || types.iter().any(|t| t.name == ty) {
        Ok(())
    } else {
        Err(ParseError::UndeclaredType {
            pos,
            name: ty.to_owned(),
        })
    }
}

fn lift_atom(
    atom: &RawAtom,
    params: &[(TypedParam, Pos)],
    objects: &[(String, String)],
) -> Result<Atom, ParseError> {
    let args = atom
        .args
        .iter()
        .map(|(a, pos)| {
            if a.starts_with('?') {
                if params.iter().any(|(p, _)| &p.name == a) {
                    Ok(Term::Var(a.clone()))
                } else {
                    Err(ParseError::UndeclaredObject {
                        pos: *pos,
                        name: a.clone(),
                    })
                }
            } else if objects.iter().any(|(o, _)| o == a) {
                Ok(Term::Const(a.clone()))
            } else {
                Err(ParseError::UndeclaredObject {
                    pos: *pos,
                    name: a.clone(),
                })
            }
        })
        .collect::<Result<_, _>>()?;
    Ok(Atom {
        predicate: atom.predicate.clone(),
        args,
    })
}

fn ground_atom(atom: &RawAtom, objects: &[(String, String)]) -> Result<GroundAtom, ParseError> {
    let args = atom
        .args
        .iter()
        .map(|(a, pos)| {
            if objects.iter().any(|(o, _)| o == a) {
                Ok(a.clone())
            } else {
                Err(ParseError::UndeclaredObject {
                    pos: *pos,
                    name: a.clone(),
                })
            }
        })
        .collect::<Result<_, _>>()?;
    Ok(GroundAtom {
        predicate: atom.predicate.clone(),
        args,
    })
}

/// Parses a domain and a problem into a [`LiftedTask`].
pub fn parse(
    domain_text: &str,
    problem_text: &str,
    options: ParseOptions,
) -> Result<LiftedTask, ParseError> {
    let domain = parse_domain(&read_sexp(domain_text)?)?;
    let problem = parse_problem(&read_sexp(problem_text)?)?;
    if !problem.domain.is_empty() && problem.domain != domain.name {
        return Err(ParseError::DomainMismatch {
            expected: domain.name,
            found: problem.domain,
        });
    }

    for t in &domain.types {
        if t.parent != "object" && !domain.types.iter().any(|d| d.name == t.parent) {
            return Err(ParseError::UndeclaredType {
                pos: Pos::default(),
                name: t.parent.clone(),
            });
        }
    }

    let mut objects: Vec<(String, String)> = Vec::new();
    for (name, ty, pos) in domain.constants.iter().chain(problem.objects.iter()) {
        check_type(&domain.types, ty, *pos)?;
        if !objects.iter().any(|(o, _)| o == name) {
            objects.push((name.clone(), ty.clone()));
        }
    }

    let mut checker = Checker {
        strict: options.strict,
        predicates: domain.predicates.clone(),
    };
    for p in &domain.predicates {
        for param in &p.params {
            check_type(&domain.types, &param.ty, Pos::default())?;
        }
    }

    let mut schemas = Vec::new();
    for a in &domain.actions {
        for (p, pos) in &a.params {
            check_type(&domain.types, &p.ty, *pos)?;
        }
        for atom in a.precondition.iter().chain(&a.add).chain(&a.del) {
            checker.check_atom(atom)?;
        }
        let lift = |atoms: &[RawAtom]| -> Result<Vec<Atom>, ParseError> {
            atoms
                .iter()
                .map(|x| lift_atom(x, &a.params, &objects))
                .collect()
        };
        schemas.push(ActionSchema {
            name: a.name.clone(),
            params: a.params.iter().map(|(p, _)| p.clone()).collect(),
            precondition: lift(&a.precondition)?,
            add: lift(&a.add)?,
            del: lift(&a.del)?,
        });
    }

    let mut init = Vec::new();
    for atom in &problem.init {
        checker.check_atom(atom)?;
        init.push(ground_atom(atom, &objects)?);
    }
    let mut goal = Vec::new();
    for atom in &problem.goal {
        checker.check_atom(atom)?;
        goal.push(ground_atom(atom, &objects)?);
    }

    Ok(LiftedTask {
        domain_name: domain.name,
        problem_name: problem.name,
        types: domain.types,
        objects,
        predicates: checker.predicates,
        action_schemas: schemas,
        init,
        goal,
    })
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            match a {
                Term::Var(v) | Term::Const(v) => write!(f, " {v}")?,
            }
        }
        f.write_str(")")
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.text())
    }
}

impl TypedParam {
    pub fn new(name: &str, ty: &str) -> Self {
        Self {
            name: name.to_string(),
            ty: ty.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assets;

    #[test]
    fn household_v1_lenient() {
        let m = assets::HOUSEHOLD_V1;
        let task = parse(m.domain, m.problem, ParseOptions::LENIENT).unwrap();
        assert_eq!(task.action_schemas.len(), 5);
        // 8 declared, plus `charged` auto-declared from use.
        assert_eq!(task.predicates.len(), 9);
        assert!(task.predicate("charged").is_some());
        let keys: Vec<_> = task
            .objects
            .iter()
            .filter(|(_, t)| t == "key")
            .map(|(o, _)| o.as_str())
            .collect();
        assert_eq!(keys, ["yellow", "green", "red"]);
    }

    #[test]
    fn household_v1_strict_rejects_charged() {
        let m = assets::HOUSEHOLD_V1;
        let err = parse(m.domain, m.problem, ParseOptions::STRICT).unwrap_err();
        match err {
            ParseError::UndeclaredPredicate { name, pos } => {
                assert_eq!(name, "charged");
                assert_eq!(pos.line, 19);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn household_v2_has_no_objects() {
        let m = assets::HOUSEHOLD_V2;
        let task = parse(m.domain, m.problem, ParseOptions::STRICT).unwrap();
        assert!(task.objects.is_empty());
        assert_eq!(task.action_schemas.len(), 2);
    }

    #[test]
    fn single_atom_precondition_and_empty_and() {
        let m = assets::HOUSEHOLD_V1;
        let task = parse(m.domain, m.problem, ParseOptions::LENIENT).unwrap();
        let charge = &task.action_schemas[1];
        assert_eq!(charge.precondition.len(), 1);
        assert_eq!(charge.precondition[0].predicate, "has-key");
        assert!(task.action_schemas[0].precondition.is_empty());
    }

    const TINY_PROBLEM: &str = "(define (problem p) (:domain d) (:init) (:goal (and (q))))";

    #[test]
    fn undeclared_predicate_in_strict_mode() {
        let dom = "(define (domain d) (:requirements :strips) (:predicates (q))
            (:action a :parameters () :precondition (and (missing)) :effect (and (q))))";
        let err = parse(dom, TINY_PROBLEM, ParseOptions::STRICT).unwrap_err();
        assert!(matches!(err, ParseError::UndeclaredPredicate { ref name, .. } if name == "missing"));
    }

    #[test]
    fn arity_mismatch_is_rejected_in_both_modes() {
        let dom = "(define (domain d) (:predicates (q) (r ?x))
            (:action a :parameters () :precondition (r) :effect (q)))";
        for opts in [ParseOptions::STRICT, ParseOptions::LENIENT] {
            let err = parse(dom, TINY_PROBLEM, opts).unwrap_err();
            assert!(matches!(
                err,
                ParseError::ArityMismatch { expected: 1, found: 0, .. }
            ));
        }
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse("(define (domain d)\n  (:predicates (q)", TINY_PROBLEM, ParseOptions::LENIENT)
            .unwrap_err();
        assert!(matches!(err, ParseError::Syntax { pos: Pos { line: 2, col: 3 }, .. }));
        let err = parse("(define (domain d)))", TINY_PROBLEM, ParseOptions::LENIENT).unwrap_err();
        assert!(matches!(err, ParseError::Syntax { pos: Pos { line: 1, col: 20 }, .. }));
    }

    #[test]
    fn unsupported_requirement() {
        let dom = "(define (domain d) (:requirements :strips :adl) (:predicates (q)))";
        let err = parse(dom, TINY_PROBLEM, ParseOptions::LENIENT).unwrap_err();
        assert!(matches!(err, ParseError::UnsupportedRequirement { ref name, .. } if name == ":adl"));
    }

    #[test]
    fn undeclared_type_and_object() {
        let dom = "(define (domain d) (:types key - object) (:predicates (q) (h ?k - key)))";
        let prob = "(define (problem p) (:domain d) (:objects a - box) (:init) (:goal (q)))";
        assert!(matches!(
            parse(dom, prob, ParseOptions::LENIENT).unwrap_err(),
            ParseError::UndeclaredType { .. }
        ));
        let prob = "(define (problem p) (:domain d) (:objects a - key) (:init (h b)) (:goal (q)))";
        assert!(matches!(
            parse(dom, prob, ParseOptions::LENIENT).unwrap_err(),
            ParseError::UndeclaredObject { ref name, .. } if name == "b"
        ));
    }

    #[test]
    fn negative_preconditions_rejected() {
        let dom = "(define (domain d) (:predicates (q))
            (:action a :parameters () :precondition (not (q)) :effect (q)))";
        assert!(matches!(
            parse(dom, TINY_PROBLEM, ParseOptions::LENIENT).unwrap_err(),
            ParseError::Syntax { .. }
        ));
    }

    #[test]
    fn delete_effects_and_comments() {
        let dom = "; a comment\n(define (domain D) (:predicates (q) (r))
            (:action A :parameters () :precondition () :effect (and (Q) (not (r)))))";
        let task = parse(dom, TINY_PROBLEM, ParseOptions::STRICT).unwrap();
        let a = &task.action_schemas[0];
        assert_eq!(a.name, "a");
        assert_eq!(a.add[0].predicate, "q");
        assert_eq!(a.del[0].predicate, "r");
    }
}
