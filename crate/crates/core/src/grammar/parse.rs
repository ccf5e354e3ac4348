//! Lexer and recursive-descent parser for constraint expressions and grammar files.

use std::collections::BTreeSet;

use super::expr::{CmpOp, Expr, Kind, Term, Var};
use super::{Consequent, Constraint, Grammar, PreferenceInduced, Scope};
use crate::error::{Error, Result};
use crate::lexicon::Layer;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Quoted(String),
    Int(i64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Eq,
    Ne,
    Lt,
    In,
    Cap,
    And,
    Or,
    Not,
    Implies,
    Iff,
    Assign,
    FatArrow,
}

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        message: message.into(),
    }
}

fn tokenize(src: &str, line: usize) -> Result<Vec<Tok>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        let mut step = 1;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ',' => Tok::Comma,
            '&' | '∧' => Tok::And,
            '|' | '∨' => Tok::Or,
            '¬' => Tok::Not,
            '≠' => Tok::Ne,
            '∈' => Tok::In,
            '∩' => Tok::Cap,
            '→' => Tok::Implies,
            '↔' => Tok::Iff,
            '=' if next == Some('>') => {
                step = 2;
                Tok::FatArrow
            }
            '=' => Tok::Eq,
            '!' if next == Some('=') => {
                step = 2;
                Tok::Ne
            }
            '!' => Tok::Not,
            '-' if next == Some('>') => {
                step = 2;
                Tok::Implies
            }
            '<' if next == Some('-') && chars.get(i + 2) == Some(&'>') => {
                step = 3;
                Tok::Iff
            }
            '<' => Tok::Lt,
            ':' if next == Some('=') => {
                step = 2;
                Tok::Assign
            }
            '"' => {
                let start = i + 1;
                let end = chars[start..]
                    .iter()
                    .position(|&c| c == '"')
                    .ok_or_else(|| syntax(line, "unterminated quoted symbol"))?;
                step = end + 2;
                Tok::Quoted(chars[start..start + end].iter().collect())
            }
            c if c.is_alphanumeric() || c == '_' => {
                let mut j = i + 1;
                while j < chars.len() {
                    let d = chars[j];
                    let ok = d.is_alphanumeric()
                        || d == '_'
                        || (d == '-' && chars.get(j + 1) != Some(&'>'));
                    if !ok {
                        break;
                    }
                    j += 1;
                }
                // a trailing hyphen belongs to the next token
                while j > i + 1 && chars[j - 1] == '-' {
                    j -= 1;
                }
                step = j - i;
                let word: String = chars[i..j].iter().collect();
                match word.as_str() {
                    "in" => Tok::In,
                    "cap" => Tok::Cap,
                    _ if word.chars().all(|c| c.is_ascii_digit()) => Tok::Int(
                        word.parse()
                            .map_err(|_| syntax(line, format!("integer `{word}` out of range")))?,
                    ),
                    _ => Tok::Ident(word),
                }
            }
            other => return Err(syntax(line, format!("unexpected character `{other}`"))),
        };
        out.push(tok);
        i += step;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    line: usize,
}

impl Parser {
    fn new(toks: Vec<Tok>, line: usize) -> Self {
        Parser { toks, pos: 0, line }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<()> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        let message = message.into();
        match self.peek() {
            Some(t) => syntax(self.line, format!("{message}, found {t:?}")),
            None => syntax(self.line, format!("{message}, found end of input")),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    // iff < implies < or < and < not
    fn expr(&mut self) -> Result<Expr> {
        let lhs = self.implies()?;
        if self.eat(&Tok::Iff) {
            let rhs = self.expr()?;
            return Ok(Expr::Iff(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Expr> {
        let lhs = self.or()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.implies()?;
            return Ok(Expr::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Expr> {
        let mut lhs = self.and()?;
        while self.eat(&Tok::Or) {
            let rhs = self.and()?;
            lhs = Expr::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::And) {
            let rhs = self.unary()?;
            lhs = Expr::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(&Tok::Not) {
            return Ok(Expr::Not(Box::new(self.unary()?)));
        }
        if self.eat(&Tok::LParen) {
            let e = self.expr()?;
            self.expect(&Tok::RParen, "`)`")?;
            return Ok(e);
        }
        if let Some(Tok::Ident(w)) = self.peek() {
            if (w == "true" || w == "false") && self.peek_at(1) != Some(&Tok::LParen) {
                let v = w == "true";
                self.pos += 1;
                return Ok(Expr::Const(v));
            }
        }
        let lhs = self.term()?;
        let op = match self.bump() {
            Some(Tok::Eq) => CmpOp::Eq,
            Some(Tok::Ne) => CmpOp::Ne,
            Some(Tok::Lt) => CmpOp::Lt,
            Some(Tok::In) => CmpOp::In,
            _ => {
                self.pos -= 1;
                return Err(self.err("expected comparison operator"));
            }
        };
        let rhs = self.term()?;
        Ok(Expr::Cmp(op, lhs, rhs))
    }

    fn term(&mut self) -> Result<Term> {
        let mut t = self.primary()?;
        while self.eat(&Tok::Cap) {
            let rhs = self.primary()?;
            t = Term::Intersect(Box::new(t), Box::new(rhs));
        }
        Ok(t)
    }

    fn var(&mut self) -> Result<Var> {
        match self.bump() {
            Some(Tok::Ident(v)) if v == "X" => Ok(Var::X),
            Some(Tok::Ident(v)) if v == "Y" => Ok(Var::Y),
            Some(Tok::Ident(v)) if v == "Z" => Ok(Var::Z),
            _ => {
                self.pos -= 1;
                Err(self.err("expected relation variable X, Y or Z"))
            }
        }
    }

    fn set_member(&mut self) -> Result<String> {
        match self.bump() {
            Some(Tok::Ident(s)) | Some(Tok::Quoted(s)) => Ok(s),
            Some(Tok::Int(i)) => Ok(i.to_string()),
            _ => {
                self.pos -= 1;
                Err(self.err("expected symbol in set"))
            }
        }
    }

    fn primary(&mut self) -> Result<Term> {
        match self.bump() {
            Some(Tok::Int(i)) => Ok(Term::Int(i)),
            Some(Tok::Quoted(s)) => Ok(Term::Sym(s)),
            Some(Tok::LBrace) => {
                let mut set = BTreeSet::new();
                if !self.eat(&Tok::RBrace) {
                    loop {
                        set.insert(self.set_member()?);
                        if self.eat(&Tok::RBrace) {
                            break;
                        }
                        self.expect(&Tok::Comma, "`,` or `}`")?;
                    }
                }
                Ok(Term::Set(set))
            }
            Some(Tok::Ident(name)) => {
                if !self.eat(&Tok::LParen) {
                    return Ok(Term::Sym(name));
                }
                let t = match name.as_str() {
                    "dep" => Term::Dep(self.var()?),
                    "dom" => Term::Dom(self.var()?, None),
                    "syndom" => Term::Dom(self.var()?, Some(Layer::Syn)),
                    "semdom" => Term::Dom(self.var()?, Some(Layer::Sem)),
                    "lab" => Term::Label(self.var()?, None),
                    "synlab" => Term::Label(self.var()?, Some(Layer::Syn)),
                    "semlab" => Term::Label(self.var()?, Some(Layer::Sem)),
                    "pos" => Term::Pos(Box::new(self.term()?)),
                    "word" => Term::Word(Box::new(self.term()?)),
                    "cat" => Term::Cat(Box::new(self.term()?)),
                    "num" | "case" | "semprop" => Term::Feature(name, Box::new(self.term()?)),
                    "feature" => {
                        let fname = self.set_member()?;
                        self.expect(&Tok::Comma, "`,`")?;
                        Term::Feature(fname, Box::new(self.term()?))
                    }
                    other => return Err(syntax(self.line, format!("unknown accessor `{other}`"))),
                };
                self.expect(&Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => {
                self.pos -= 1;
                Err(self.err("expected term"))
            }
        }
    }
}

/// Layers of X, Y, Z for the checker; `None` means the variable is not available.
#[derive(Debug, Clone, Copy)]
pub(crate) struct VarLayers(pub [Option<Layer>; 3]);

struct Checker<'g> {
    line: usize,
    vars: VarLayers,
    labels: &'g [Vec<String>; 2],
}

impl Checker<'_> {
    fn var_layer(&self, v: Var) -> Result<Layer> {
        self.vars.0[v.index()]
            .ok_or_else(|| syntax(self.line, format!("variable {v} is not bound here")))
    }

    fn scoped(&self, v: Var, want: Option<Layer>, what: &str) -> Result<Layer> {
        let layer = self.var_layer(v)?;
        match want {
            Some(w) if w != layer => Err(Error::AccessorScope(format!(
                "line {}: {w}{what}({v}) used where {v} is a {layer} relation",
                self.line
            ))),
            _ => Ok(layer),
        }
    }

    fn term(&self, t: &Term) -> Result<Kind> {
        Ok(match t {
            Term::Dep(v) => {
                self.var_layer(*v)?;
                Kind::Node
            }
            Term::Dom(v, want) => {
                self.scoped(*v, *want, "dom")?;
                Kind::Node
            }
            Term::Label(v, want) => {
                self.scoped(*v, *want, "lab")?;
                Kind::Sym
            }
            Term::Pos(a) | Term::Word(a) | Term::Cat(a) | Term::Feature(_, a) => {
                let k = self.term(a)?;
                if k != Kind::Node {
                    return Err(syntax(self.line, format!("accessor applied to {k}, expected node")));
                }
                match t {
                    Term::Pos(_) => Kind::Int,
                    Term::Word(_) | Term::Cat(_) => Kind::Sym,
                    _ => Kind::Set,
                }
            }
            Term::Sym(_) => Kind::Sym,
            Term::Int(_) => Kind::Int,
            Term::Set(_) => Kind::Set,
            Term::Intersect(a, b) => {
                let (ka, kb) = (self.term(a)?, self.term(b)?);
                if ka != Kind::Set || kb != Kind::Set {
                    return Err(syntax(self.line, "intersection needs two sets"));
                }
                Kind::Set
            }
        })
    }

    fn label_literals(&self, label_side: &Term, other: &Term) -> Result<()> {
        let Term::Label(v, _) = label_side else {
            return Ok(());
        };
        let layer = self.var_layer(*v)?;
        let declared = &self.labels[layer.index()];
        let check = |l: &String| {
            if declared.contains(l) {
                Ok(())
            } else {
                Err(Error::UndeclaredLabel {
                    line: self.line,
                    layer,
                    label: l.clone(),
                })
            }
        };
        match other {
            Term::Sym(l) => check(l),
            Term::Set(ls) => ls.iter().try_for_each(check),
            _ => Ok(()),
        }
    }

    fn expr(&self, e: &Expr) -> Result<()> {
        match e {
            Expr::Const(_) => Ok(()),
            Expr::Cmp(op, l, r) => {
                let (kl, kr) = (self.term(l)?, self.term(r)?);
                let ok = match op {
                    CmpOp::Eq | CmpOp::Ne => {
                        kl == kr || matches!((kl, kr), (Kind::Set, Kind::Sym) | (Kind::Sym, Kind::Set))
                    }
                    CmpOp::Lt => kl == kr && matches!(kl, Kind::Int | Kind::Node),
                    CmpOp::In => kr == Kind::Set && matches!(kl, Kind::Sym | Kind::Set),
                };
                if !ok {
                    return Err(syntax(
                        self.line,
                        format!("ill-typed comparison {kl} {op} {kr}"),
                    ));
                }
                self.label_literals(l, r)?;
                self.label_literals(r, l)
            }
            Expr::Not(a) => self.expr(a),
            Expr::And(a, b) | Expr::Or(a, b) | Expr::Implies(a, b) | Expr::Iff(a, b) => {
                self.expr(a)?;
                self.expr(b)
            }
        }
    }
}

pub(crate) fn check_expr(
    e: &Expr,
    vars: VarLayers,
    labels: &[Vec<String>; 2],
    line: usize,
) -> Result<()> {
    Checker { line, vars, labels }.expr(e)
}

/// Parses a standalone expression (no type checking).
pub fn parse_expr(src: &str) -> Result<Expr> {
    let mut p = Parser::new(tokenize(src, 1)?, 1);
    let e = p.expr()?;
    if !p.at_end() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

struct Header {
    kind: String,
    id: Option<String>,
    opts: Vec<(String, String)>,
}

impl Header {
    fn opt(&self, key: &str) -> Option<&str> {
        self.opts
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

fn parse_header(text: &str, line: usize) -> Result<Header> {
    let mut words = text.split_whitespace();
    let kind = words.next().unwrap_or_default().to_string();
    let mut id = None;
    let mut opts = Vec::new();
    for w in words {
        match w.split_once('=') {
            Some((k, v)) => opts.push((k.to_string(), v.to_string())),
            None if id.is_none() => id = Some(w.to_string()),
            None => return Err(syntax(line, format!("unexpected `{w}` in header"))),
        }
    }
    Ok(Header { kind, id, opts })
}

fn parse_pf(h: &Header, line: usize, required: bool) -> Result<f64> {
    let Some(raw) = h.opt("pf") else {
        if required {
            return Err(syntax(line, "missing pf="));
        }
        return Ok(0.0);
    };
    let value: f64 = raw
        .parse()
        .map_err(|_| syntax(line, format!("invalid pf `{raw}`")))?;
    if !(0.0..1.0).contains(&value) {
        return Err(Error::PfOutOfRange { line, value });
    }
    Ok(value)
}

fn parse_scope(raw: Option<&str>, default: Scope, line: usize) -> Result<Scope> {
    match raw {
        None => Ok(default),
        Some("syn") => Ok(Scope::Syn),
        Some("sem") => Ok(Scope::Sem),
        Some("cross") => Ok(Scope::Cross),
        Some(other) => Err(syntax(line, format!("unknown layer scope `{other}`"))),
    }
}

fn parse_arity(raw: Option<&str>, line: usize) -> Result<u8> {
    match raw {
        None | Some("1") => Ok(1),
        Some("2") => Ok(2),
        Some(other) => Err(syntax(line, format!("arity must be 1 or 2, got `{other}`"))),
    }
}

/// Joins indented continuation lines onto their statement; strips comments.
fn statements(text: &str) -> Vec<(usize, String)> {
    let mut out: Vec<(usize, String)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let continued = content.starts_with(char::is_whitespace);
        match out.last_mut() {
            Some((_, stmt)) if continued => {
                stmt.push(' ');
                stmt.push_str(content.trim());
            }
            _ => out.push((idx + 1, content.trim().to_string())),
        }
    }
    out
}

fn split_tokens_at_fat_arrow(toks: Vec<Tok>, line: usize) -> Result<(Vec<Tok>, Vec<Tok>)> {
    let arrows: Vec<usize> = toks
        .iter()
        .enumerate()
        .filter(|(_, t)| **t == Tok::FatArrow)
        .map(|(i, _)| i)
        .collect();
    match arrows[..] {
        [i] => {
            let mut lhs = toks;
            let rhs = lhs.split_off(i + 1);
            lhs.pop();
            Ok((lhs, rhs))
        }
        [] => Err(syntax(line, "preference-induced constraint needs `=>`")),
        _ => Err(syntax(
            line,
            "nested preference-induced consequents are not supported",
        )),
    }
}

fn finish_expr(toks: Vec<Tok>, line: usize) -> Result<Expr> {
    let mut p = Parser::new(toks, line);
    let e = p.expr()?;
    if !p.at_end() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

pub fn parse_grammar(text: &str) -> Result<Grammar> {
    let mut g = Grammar::empty();
    // labels may be declared after use; constraints are checked afterwards
    let mut pending_constraints = Vec::new();
    let mut pending_pinduced = Vec::new();
    for (line, stmt) in statements(text) {
        let (head, body) = match stmt.split_once(':') {
            Some((h, b)) if !b.starts_with('=') => (h, Some(b)),
            _ => (stmt.as_str(), None),
        };
        let kind = head.split_whitespace().next().unwrap_or_default();
        let header = match kind {
            "constraint" | "pinduced" => parse_header(head, line)?,
            _ => Header {
                kind: kind.to_string(),
                id: None,
                opts: Vec::new(),
            },
        };
        match header.kind.as_str() {
            "label-set" => {
                let mut words = head.split_whitespace().skip(1);
                let layer: Layer = words
                    .next()
                    .ok_or_else(|| syntax(line, "label-set needs a layer"))?
                    .parse()
                    .map_err(|e: String| syntax(line, e))?;
                for l in words {
                    let labels = &mut g.labels[layer.index()];
                    if !labels.iter().any(|x| x == l) {
                        labels.push(l.to_string());
                    }
                }
            }
            "category-set" => {
                g.categories = head.split_whitespace().skip(1).map(str::to_string).collect();
            }
            "activation-threshold" => {
                let raw = head
                    .split_whitespace()
                    .nth(1)
                    .ok_or_else(|| syntax(line, "activation-threshold needs a value"))?;
                g.activation_threshold = raw
                    .parse()
                    .ok()
                    .filter(|v: &f64| *v >= 1.0)
                    .ok_or_else(|| syntax(line, format!("invalid activation threshold `{raw}`")))?;
            }
            "constraint" => {
                let body = body.ok_or_else(|| syntax(line, "missing `:` before expression"))?;
                let id = header.id.clone().ok_or_else(|| syntax(line, "missing constraint id"))?;
                let scope = parse_scope(header.opt("layer"), Scope::Syn, line)?;
                let arity = parse_arity(header.opt("arity"), line)?;
                if scope == Scope::Cross && arity != 2 {
                    return Err(syntax(line, "cross-layer constraints must be binary"));
                }
                let pf = parse_pf(&header, line, true)?;
                let expr = finish_expr(tokenize(body, line)?, line)?;
                pending_constraints.push((line, Constraint::new(id, scope, arity, pf, expr)));
            }
            "pinduced" => {
                let body = body.ok_or_else(|| syntax(line, "missing `:` before trigger"))?;
                let id = header.id.clone().ok_or_else(|| syntax(line, "missing pinduced id"))?;
                let trigger_layer: Layer = header
                    .opt("layer")
                    .unwrap_or("syn")
                    .parse()
                    .map_err(|e: String| syntax(line, e))?;
                let (ltoks, rtoks) = split_tokens_at_fat_arrow(tokenize(body, line)?, line)?;
                let trigger = finish_expr(ltoks, line)?;
                let consequent = if rtoks.contains(&Tok::Assign) {
                    let mut p = Parser::new(rtoks, line);
                    let target = p.term()?;
                    p.expect(&Tok::Assign, "`:=`")?;
                    let value = p.term()?;
                    if !p.at_end() {
                        return Err(p.err("trailing input"));
                    }
                    let Term::Feature(feature, node) = target else {
                        return Err(syntax(line, "projection target must be a feature accessor"));
                    };
                    Consequent::Project {
                        feature,
                        node: *node,
                        value,
                    }
                } else {
                    let default = match trigger_layer {
                        Layer::Syn => Scope::Syn,
                        Layer::Sem => Scope::Sem,
                    };
                    let scope = parse_scope(header.opt("scope"), default, line)?;
                    let arity = parse_arity(header.opt("arity"), line)?;
                    if scope == Scope::Cross && arity != 2 {
                        return Err(syntax(line, "cross-layer templates must be binary"));
                    }
                    let pf = parse_pf(&header, line, true)?;
                    let expr = finish_expr(rtoks, line)?;
                    Consequent::Template(Constraint::template(id.clone(), scope, arity, pf, expr))
                };
                pending_pinduced.push((
                    line,
                    PreferenceInduced {
                        id,
                        trigger_layer,
                        trigger,
                        consequent,
                    },
                ));
            }
            other => return Err(syntax(line, format!("unknown statement `{other}`"))),
        }
    }

    let mut seen = BTreeSet::new();
    for (line, c) in pending_constraints {
        if !seen.insert(c.id.clone()) {
            return Err(Error::DuplicateConstraint { line, id: c.id });
        }
        check_expr(&c.expr, c.var_layers(None), &g.labels, line)?;
        g.constraints.push(c);
    }
    for (line, p) in pending_pinduced {
        if !seen.insert(p.id.clone()) {
            return Err(Error::DuplicateConstraint { line, id: p.id });
        }
        let x_only = VarLayers([Some(p.trigger_layer), None, None]);
        check_expr(&p.trigger, x_only, &g.labels, line)?;
        if p.trigger.vars().iter().any(|v| *v != Var::X) {
            return Err(syntax(line, "trigger must be unary over X"));
        }
        match &p.consequent {
            Consequent::Template(c) => {
                check_expr(&c.expr, c.var_layers(Some(p.trigger_layer)), &g.labels, line)?;
            }
            Consequent::Project { node, value, .. } => {
                let checker = Checker {
                    line,
                    vars: x_only,
                    labels: &g.labels,
                };
                if checker.term(node)? != Kind::Node {
                    return Err(syntax(line, "projection target must be a node of X"));
                }
                if checker.term(value)? != Kind::Set {
                    return Err(syntax(line, "projected value must be a set"));
                }
            }
        }
        g.pinduced.push(p);
    }
    Ok(g)
}
