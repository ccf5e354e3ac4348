//! Penalty-weighted constraints, preference-induced implications and grammar files.
//!
//! A constraint is a boolean expression over one or two candidate relations
//! (`X`, `Y`). A top-level implication `guard -> body` makes the constraint
//! inapplicable wherever the guard is false; inapplicable instances never
//! contribute a penalty. A violated instance multiplies the confidence score
//! by the constraint's penalty factor, `pf = 0` marking a strict constraint.
//!
//! Preference-induced constraints pair a unary trigger over `X` with either a
//! constraint template over `Y` (and `Z`), instantiated once the trigger is
//! decided, or a feature projection onto a node reachable from `X`.

mod expr;
mod parse;

use std::fmt;

pub use expr::{Bindings, CmpOp, Expr, Term, Var};
pub use parse::{parse_expr, parse_grammar};

use crate::error::{Error, Result};
use crate::lexicon::{CandidateRelation, Layer, Sentence};
use parse::VarLayers;

/// Which relations a constraint reads. `Cross` binds the first variable to a
/// syntactic and the second to a semantic relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scope {
    Syn,
    Sem,
    Cross,
}

impl Scope {
    fn layers(self) -> (Layer, Layer) {
        match self {
            Scope::Syn => (Layer::Syn, Layer::Syn),
            Scope::Sem => (Layer::Sem, Layer::Sem),
            Scope::Cross => (Layer::Syn, Layer::Sem),
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scope::Syn => "syn",
            Scope::Sem => "sem",
            Scope::Cross => "cross",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Holds,
    Violated,
    Inapplicable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub id: String,
    pub scope: Scope,
    pub arity: u8,
    pub pf: f64,
    pub expr: Expr,
    /// Templates read the trigger through `X` and range over `Y`, `Z`.
    template: bool,
}

impl Constraint {
    pub fn new(id: impl Into<String>, scope: Scope, arity: u8, pf: f64, expr: Expr) -> Self {
        Constraint {
            id: id.into(),
            scope,
            arity,
            pf,
            expr,
            template: false,
        }
    }

    pub(crate) fn template(id: String, scope: Scope, arity: u8, pf: f64, expr: Expr) -> Self {
        Constraint {
            template: true,
            ..Constraint::new(id, scope, arity, pf, expr)
        }
    }

    pub fn is_strict(&self) -> bool {
        self.pf == 0.0
    }

    fn free_vars(&self) -> (Var, Var) {
        if self.template {
            (Var::Y, Var::Z)
        } else {
            (Var::X, Var::Y)
        }
    }

    pub(crate) fn var_layers(&self, trigger: Option<Layer>) -> VarLayers {
        let (a, b) = self.scope.layers();
        let (va, vb) = self.free_vars();
        let mut slots = [None; 3];
        slots[va.index()] = Some(a);
        if self.arity == 2 {
            slots[vb.index()] = Some(b);
        }
        if self.template {
            slots[Var::X.index()] = trigger;
        }
        VarLayers(slots)
    }

    /// Whether a relation on `layer` can fill the single slot of a unary constraint.
    pub fn applies_to(&self, layer: Layer) -> bool {
        self.arity == 1 && self.scope.layers().0 == layer
    }

    /// Whether relations on `a` and `b` (in either order) can fill a binary constraint.
    pub fn applies_to_pair(&self, a: Layer, b: Layer) -> bool {
        if self.arity != 2 {
            return false;
        }
        let (x, y) = self.scope.layers();
        (a, b) == (x, y) || (b, a) == (x, y)
    }

    fn verdict(&self, b: &Bindings<'_>, s: &Sentence) -> Verdict {
        let (guard, body) = match &self.expr {
            Expr::Implies(g, body) => (Some(&**g), &**body),
            e => (None, e),
        };
        if guard.is_some_and(|g| !g.eval(b, s)) {
            Verdict::Inapplicable
        } else if body.eval(b, s) {
            Verdict::Holds
        } else {
            Verdict::Violated
        }
    }

    /// Unary check; `trigger` binds `X` for templates.
    pub fn check_unary(
        &self,
        trigger: Option<&CandidateRelation>,
        x: &CandidateRelation,
        s: &Sentence,
    ) -> Verdict {
        let (va, _) = self.free_vars();
        let mut b = Bindings::new().with(va, x);
        if let Some(t) = trigger {
            b = b.with(Var::X, t);
        }
        self.verdict(&b, s)
    }

    /// Binary check with symmetric application. Callers must ensure
    /// `applies_to_pair`.
    pub fn check_binary(
        &self,
        trigger: Option<&CandidateRelation>,
        x: &CandidateRelation,
        y: &CandidateRelation,
        s: &Sentence,
    ) -> Verdict {
        let (va, vb) = self.free_vars();
        let bind = |p: &CandidateRelation, q: &CandidateRelation| {
            let mut b = Bindings::new().with(va, p).with(vb, q);
            if let Some(t) = trigger {
                b = b.with(Var::X, t);
            }
            self.verdict(&b, s)
        };
        if self.scope == Scope::Cross {
            return if x.layer == Layer::Syn { bind(x, y) } else { bind(y, x) };
        }
        match (bind(x, y), bind(y, x)) {
            (Verdict::Violated, _) | (_, Verdict::Violated) => Verdict::Violated,
            (Verdict::Holds, _) | (_, Verdict::Holds) => Verdict::Holds,
            _ => Verdict::Inapplicable,
        }
    }
}

fn scope_error(c: &Constraint, what: &str) -> Error {
    Error::AccessorScope(format!(
        "constraint {} (scope {}, arity {}) cannot be applied to {what}",
        c.id, c.scope, c.arity
    ))
}

/// Evaluates a unary constraint on one candidate relation.
pub fn eval_unary(c: &Constraint, x: &CandidateRelation, s: &Sentence) -> Result<Verdict> {
    if c.template || !c.applies_to(x.layer) {
        return Err(scope_error(c, &format!("a {} relation", x.layer)));
    }
    Ok(c.check_unary(None, x, s))
}

/// Evaluates a binary constraint on a pair; the result does not depend on
/// argument order.
pub fn eval_binary(
    c: &Constraint,
    x: &CandidateRelation,
    y: &CandidateRelation,
    s: &Sentence,
) -> Result<Verdict> {
    if c.template || !c.applies_to_pair(x.layer, y.layer) {
        return Err(scope_error(
            c,
            &format!("a {}/{} pair", x.layer, y.layer),
        ));
    }
    Ok(c.check_binary(None, x, y, s))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Consequent {
    Template(Constraint),
    /// `feature(node) := value`, with `node` and `value` over `X`.
    Project {
        feature: String,
        node: Term,
        value: Term,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceInduced {
    pub id: String,
    pub trigger_layer: Layer,
    pub trigger: Expr,
    pub consequent: Consequent,
}

impl PreferenceInduced {
    pub fn triggered_by(&self, x: &CandidateRelation, s: &Sentence) -> bool {
        x.layer == self.trigger_layer && self.trigger.eval(&Bindings::new().with(Var::X, x), s)
    }
}

pub const DEFAULT_CATEGORIES: [&str; 5] = ["N", "V", "DET", "PREP", "ADJ"];
pub const DEFAULT_ACTIVATION_THRESHOLD: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Grammar {
    /// Indexed by `Layer::index`.
    pub labels: [Vec<String>; 2],
    pub categories: Vec<String>,
    pub constraints: Vec<Constraint>,
    pub pinduced: Vec<PreferenceInduced>,
    /// Dominance ratio at which a candidate counts as decided.
    pub activation_threshold: f64,
}

impl Grammar {
    pub fn empty() -> Self {
        Grammar {
            labels: [Vec::new(), Vec::new()],
            categories: DEFAULT_CATEGORIES.iter().map(|c| c.to_string()).collect(),
            constraints: Vec::new(),
            pinduced: Vec::new(),
            activation_threshold: DEFAULT_ACTIVATION_THRESHOLD,
        }
    }

    pub fn labels(&self, layer: Layer) -> &[String] {
        &self.labels[layer.index()]
    }

    pub fn constraint(&self, id: &str) -> Option<&Constraint> {
        self.constraints.iter().find(|c| c.id == id)
    }

    /// A copy without the constraint or preference-induced constraint `id`.
    pub fn without(&self, id: &str) -> Grammar {
        let mut g = self.clone();
        g.constraints.retain(|c| c.id != id);
        g.pinduced.retain(|p| p.id != id);
        g
    }

    /// A copy with the penalty factor of `id` replaced.
    pub fn with_pf(&self, id: &str, pf: f64) -> Grammar {
        let mut g = self.clone();
        for c in g.constraints.iter_mut().filter(|c| c.id == id) {
            c.pf = pf;
        }
        g
    }
}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for layer in Layer::ALL {
            if !self.labels(layer).is_empty() {
                writeln!(f, "label-set {layer} {}", self.labels(layer).join(" "))?;
            }
        }
        writeln!(f, "category-set {}", self.categories.join(" "))?;
        writeln!(f, "activation-threshold {}", self.activation_threshold)?;
        for c in &self.constraints {
            writeln!(
                f,
                "constraint {} layer={} arity={} pf={} : {}",
                c.id, c.scope, c.arity, c.pf, c.expr
            )?;
        }
        for p in &self.pinduced {
            match &p.consequent {
                Consequent::Template(c) => writeln!(
                    f,
                    "pinduced {} layer={} scope={} arity={} pf={} : {} => {}",
                    p.id, p.trigger_layer, c.scope, c.arity, c.pf, p.trigger, c.expr
                )?,
                Consequent::Project {
                    feature,
                    node,
                    value,
                } => {
                    let target = Term::Feature(feature.clone(), Box::new(node.clone()));
                    writeln!(
                        f,
                        "pinduced {} layer={} : {} => {target} := {value}",
                        p.id, p.trigger_layer, p.trigger
                    )?
                }
            }
        }
        Ok(())
    }
}
