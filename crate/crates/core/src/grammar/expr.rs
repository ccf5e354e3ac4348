//! Expression trees over candidate relations and their three-valued evaluation.

use std::borrow::Cow;
use std::collections::BTreeSet;
use std::fmt;

use crate::lexicon::{CandidateRelation, FeatureValue, Layer, Sentence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X,
    Y,
    Z,
}

impl Var {
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Var::X => "X",
            Var::Y => "Y",
            Var::Z => "Z",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    /// Modifier of a relation.
    Dep(Var),
    /// Modifiee of a relation; the layer is set for `syndom`/`semdom`.
    Dom(Var, Option<Layer>),
    /// Relation name; the layer is set for `synlab`/`semlab`.
    Label(Var, Option<Layer>),
    Pos(Box<Term>),
    Word(Box<Term>),
    Cat(Box<Term>),
    Feature(String, Box<Term>),
    Sym(String),
    Int(i64),
    Set(BTreeSet<String>),
    Intersect(Box<Term>, Box<Term>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    In,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Const(bool),
    Cmp(CmpOp, Term, Term),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Implies(Box<Expr>, Box<Expr>),
    Iff(Box<Expr>, Box<Expr>),
}

/// Value kinds used by the static checker.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Node,
    Sym,
    Int,
    Set,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Node => "node",
            Kind::Sym => "symbol",
            Kind::Int => "integer",
            Kind::Set => "set",
        })
    }
}

/// Relations bound to X, Y and Z.
#[derive(Debug, Clone, Copy, Default)]
pub struct Bindings<'a> {
    slots: [Option<&'a CandidateRelation>; 3],
}

impl<'a> Bindings<'a> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: Var, rel: &'a CandidateRelation) -> Self {
        self.slots[var.index()] = Some(rel);
        self
    }

    fn get(&self, var: Var) -> &'a CandidateRelation {
        self.slots[var.index()].expect("expression variable not bound; checked at parse time")
    }
}

#[derive(Debug, Clone)]
enum Value<'a> {
    /// (position, reading)
    Node(usize, usize),
    Sym(&'a str),
    Int(i64),
    Set(Cow<'a, FeatureValue>),
}

impl Term {
    fn eval<'a>(&'a self, b: &Bindings<'a>, s: &'a Sentence) -> Value<'a> {
        match self {
            Term::Dep(v) => {
                let r = b.get(*v);
                Value::Node(r.dep, r.reading)
            }
            Term::Dom(v, _) => Value::Node(b.get(*v).dom, 0),
            Term::Label(v, _) => Value::Sym(&b.get(*v).label),
            Term::Pos(t) => match t.eval(b, s) {
                Value::Node(p, _) => Value::Int(p as i64),
                _ => unreachable!("pos() argument checked to be a node"),
            },
            Term::Word(t) => match t.eval(b, s) {
                Value::Node(p, _) => Value::Sym(s.form(p)),
                _ => unreachable!("word() argument checked to be a node"),
            },
            Term::Cat(t) => match t.eval(b, s) {
                Value::Node(p, r) => Value::Sym(&s.entry(p, r).cat),
                _ => unreachable!("cat() argument checked to be a node"),
            },
            Term::Feature(name, t) => match t.eval(b, s) {
                Value::Node(p, r) => {
                    let e = s.entry(p, r);
                    Value::Set(match name.as_str() {
                        "case" => Cow::Borrowed(&e.case),
                        "semprop" => Cow::Borrowed(&e.semprop),
                        "num" => Cow::Owned(e.feature("num")),
                        other => match e.extra.get(other) {
                            Some(v) => Cow::Borrowed(v),
                            None => Cow::Owned(FeatureValue::Unspecified),
                        },
                    })
                }
                _ => unreachable!("feature argument checked to be a node"),
            },
            Term::Sym(x) => Value::Sym(x),
            Term::Int(i) => Value::Int(*i),
            Term::Set(set) => Value::Set(Cow::Owned(FeatureValue::Set(set.clone()))),
            Term::Intersect(a, c) => match (a.eval(b, s), c.eval(b, s)) {
                (Value::Set(x), Value::Set(y)) => Value::Set(Cow::Owned(x.intersect(&y))),
                _ => unreachable!("intersection operands checked to be sets"),
            },
        }
    }

    /// Evaluates a set-valued term, as needed for feature projection.
    pub fn eval_set(&self, b: &Bindings<'_>, s: &Sentence) -> Option<FeatureValue> {
        match self.eval(b, s) {
            Value::Set(v) => Some(v.into_owned()),
            _ => None,
        }
    }

    /// Position denoted by a node-valued term.
    pub fn eval_node(&self, b: &Bindings<'_>, s: &Sentence) -> Option<usize> {
        match self.eval(b, s) {
            Value::Node(p, _) => Some(p),
            _ => None,
        }
    }

    pub(crate) fn visit_vars(&self, f: &mut impl FnMut(Var)) {
        match self {
            Term::Dep(v) | Term::Dom(v, _) | Term::Label(v, _) => f(*v),
            Term::Pos(t) | Term::Word(t) | Term::Cat(t) | Term::Feature(_, t) => t.visit_vars(f),
            Term::Intersect(a, b) => {
                a.visit_vars(f);
                b.visit_vars(f);
            }
            Term::Sym(_) | Term::Int(_) | Term::Set(_) => {}
        }
    }

    pub(crate) fn visit_features(&self, f: &mut impl FnMut(&str)) {
        match self {
            Term::Feature(name, t) => {
                f(name);
                t.visit_features(f);
            }
            Term::Pos(t) | Term::Word(t) | Term::Cat(t) => t.visit_features(f),
            Term::Intersect(a, b) => {
                a.visit_features(f);
                b.visit_features(f);
            }
            Term::Dep(_) | Term::Dom(..) | Term::Label(..) | Term::Sym(_) | Term::Int(_) | Term::Set(_) => {}
        }
    }
}

fn set_eq(a: &FeatureValue, b: &FeatureValue) -> bool {
    match (a, b) {
        (FeatureValue::Unspecified, _) | (_, FeatureValue::Unspecified) => true,
        (FeatureValue::Set(x), FeatureValue::Set(y)) => x == y,
    }
}

fn compare(op: CmpOp, a: Value<'_>, b: Value<'_>) -> bool {
    use Value::*;
    match op {
        CmpOp::Eq => match (a, b) {
            (Node(x, _), Node(y, _)) => x == y,
            (Sym(x), Sym(y)) => x == y,
            (Int(x), Int(y)) => x == y,
            (Set(x), Set(y)) => set_eq(&x, &y),
            (Set(x), Sym(y)) | (Sym(y), Set(x)) => match x.as_ref() {
                FeatureValue::Unspecified => true,
                FeatureValue::Set(s) => s.len() == 1 && s.contains(y),
            },
            _ => false,
        },
        CmpOp::Ne => !compare(CmpOp::Eq, a, b),
        CmpOp::Lt => match (a, b) {
            (Int(x), Int(y)) => x < y,
            (Node(x, _), Node(y, _)) => x < y,
            _ => false,
        },
        CmpOp::In => match (a, b) {
            (Sym(x), Set(s)) => match s.as_ref() {
                FeatureValue::Unspecified => true,
                FeatureValue::Set(s) => s.contains(x),
            },
            (Set(x), Set(y)) => match (x.as_ref(), y.as_ref()) {
                (FeatureValue::Set(x), FeatureValue::Set(y)) => !x.is_disjoint(y),
                _ => true,
            },
            _ => false,
        },
    }
}

impl Expr {
    pub fn eval(&self, b: &Bindings<'_>, s: &Sentence) -> bool {
        match self {
            Expr::Const(v) => *v,
            Expr::Cmp(op, l, r) => compare(*op, l.eval(b, s), r.eval(b, s)),
            Expr::Not(e) => !e.eval(b, s),
            Expr::And(l, r) => l.eval(b, s) && r.eval(b, s),
            Expr::Or(l, r) => l.eval(b, s) || r.eval(b, s),
            Expr::Implies(l, r) => !l.eval(b, s) || r.eval(b, s),
            Expr::Iff(l, r) => l.eval(b, s) == r.eval(b, s),
        }
    }

    pub(crate) fn visit_vars(&self, f: &mut impl FnMut(Var)) {
        match self {
            Expr::Const(_) => {}
            Expr::Cmp(_, l, r) => {
                l.visit_vars(f);
                r.visit_vars(f);
            }
            Expr::Not(e) => e.visit_vars(f),
            Expr::And(l, r) | Expr::Or(l, r) | Expr::Implies(l, r) | Expr::Iff(l, r) => {
                l.visit_vars(f);
                r.visit_vars(f);
            }
        }
    }

    /// Names of the lexical features the expression reads.
    pub fn features(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_features(&mut |n| {
            out.insert(n.to_string());
        });
        out
    }

    fn visit_features(&self, f: &mut impl FnMut(&str)) {
        match self {
            Expr::Const(_) => {}
            Expr::Cmp(_, l, r) => {
                l.visit_features(f);
                r.visit_features(f);
            }
            Expr::Not(e) => e.visit_features(f),
            Expr::And(l, r) | Expr::Or(l, r) | Expr::Implies(l, r) | Expr::Iff(l, r) => {
                l.visit_features(f);
                r.visit_features(f);
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit_vars(&mut |v| {
            out.insert(v);
        });
        out
    }
}

const KEYWORDS: &[&str] = &["in", "cap", "true", "false"];

pub(crate) fn is_plain_symbol(s: &str) -> bool {
    let mut chars = s.chars().peekable();
    let Some(first) = chars.next() else {
        return false;
    };
    if !(first.is_alphanumeric() || first == '_') {
        return false;
    }
    let mut prev = first;
    for c in chars {
        if !(c.is_alphanumeric() || c == '_' || c == '-') {
            return false;
        }
        if prev == '-' && c == '>' {
            return false;
        }
        prev = c;
    }
    !s.ends_with('-')
        && !s.chars().all(|c| c.is_ascii_digit())
        && !KEYWORDS.contains(&s)
}

fn write_symbol(f: &mut fmt::Formatter<'_>, s: &str) -> fmt::Result {
    if is_plain_symbol(s) {
        f.write_str(s)
    } else {
        write!(f, "\"{s}\"")
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Dep(v) => write!(f, "dep({v})"),
            Term::Dom(v, None) => write!(f, "dom({v})"),
            Term::Dom(v, Some(l)) => write!(f, "{l}dom({v})"),
            Term::Label(v, None) => write!(f, "lab({v})"),
            Term::Label(v, Some(l)) => write!(f, "{l}lab({v})"),
            Term::Pos(t) => write!(f, "pos({t})"),
            Term::Word(t) => write!(f, "word({t})"),
            Term::Cat(t) => write!(f, "cat({t})"),
            Term::Feature(name, t) => match name.as_str() {
                "num" | "case" | "semprop" => write!(f, "{name}({t})"),
                _ => {
                    f.write_str("feature(")?;
                    write_symbol(f, name)?;
                    write!(f, ", {t})")
                }
            },
            Term::Sym(s) => write_symbol(f, s),
            Term::Int(i) => write!(f, "{i}"),
            Term::Set(items) => {
                f.write_str("{")?;
                for (i, s) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write_symbol(f, s)?;
                }
                f.write_str("}")
            }
            Term::Intersect(a, b) => write!(f, "{a} cap {b}"),
        }
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::In => " in ",
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(v) => write!(f, "{v}"),
            Expr::Cmp(op, l, r) => write!(f, "{l}{op}{r}"),
            Expr::Not(e) => write!(f, "!({e})"),
            Expr::And(l, r) => write!(f, "({l} & {r})"),
            Expr::Or(l, r) => write!(f, "({l} | {r})"),
            Expr::Implies(l, r) => write!(f, "({l} -> {r})"),
            Expr::Iff(l, r) => write!(f, "({l} <-> {r})"),
        }
    }
}
