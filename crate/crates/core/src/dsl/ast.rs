//! Abstract syntax for domain, policy and problem files.
//!
//! Every type here has a `Display` impl that prints concrete syntax which
//! parses back to a structurally identical value.

use std::collections::BTreeMap;
use std::fmt;

/// A term in an argument position: an uppercase variable or a lowercase constant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn text(&self) -> &str {
        match self {
            Term::Var(s) | Term::Const(s) => s,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.text())
    }
}

/// `name` or `name(t1, ..., tn)`; used for both fluent atoms and action terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub name: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(name: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            name: name.into(),
            args,
        }
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Atom::new(name, Vec::new())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        write_args(f, self.args.iter())
    }
}

pub(crate) fn write_args<T: fmt::Display>(
    f: &mut fmt::Formatter<'_>,
    mut args: impl Iterator<Item = T>,
) -> fmt::Result {
    if let Some(first) = args.next() {
        write!(f, "({first}")?;
        for a in args {
            write!(f, ", {a}")?;
        }
        f.write_str(")")?;
    }
    Ok(())
}

/// A possibly negated fluent atom.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub positive: bool,
    pub atom: Atom,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal {
            positive: true,
            atom,
        }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal {
            positive: false,
            atom,
        }
    }

    pub fn is_complement_of(&self, other: &Literal) -> bool {
        self.positive != other.positive && self.atom == other.atom
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("-")?;
        }
        write!(f, "{}", self.atom)
    }
}

/// One element of a rule or law body.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Condition {
    Lit(Literal),
    Neq(Term, Term),
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Lit(l) => write!(f, "{l}"),
            Condition::Neq(a, b) => write!(f, "{a} != {b}"),
        }
    }
}

fn write_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T]) -> fmt::Result {
    for (i, it) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{it}")?;
    }
    Ok(())
}

fn write_body(f: &mut fmt::Formatter<'_>, body: &[Condition]) -> fmt::Result {
    if !body.is_empty() {
        f.write_str(" if ")?;
        write_list(f, body)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortDecl {
    pub name: String,
    pub constants: Vec<String>,
}

/// A fluent or action declaration: name plus argument sort names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    pub name: String,
    pub sorts: Vec<String>,
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        write_args(f, self.sorts.iter())
    }
}

/// `causes action: effects if body.`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicLaw {
    pub action: Atom,
    pub effects: Vec<Literal>,
    pub body: Vec<Condition>,
}

/// `static head if body.`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaticLaw {
    pub head: Literal,
    pub body: Vec<Condition>,
}

/// `exec action if body.`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecCondition {
    pub action: Atom,
    pub body: Vec<Condition>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DomainSpec {
    pub sorts: Vec<SortDecl>,
    pub fluent_schemas: Vec<Schema>,
    pub action_schemas: Vec<Schema>,
    pub dynamic_laws: Vec<DynamicLaw>,
    pub static_laws: Vec<StaticLaw>,
    pub exec_conditions: Vec<ExecCondition>,
}

impl DomainSpec {
    pub fn sort(&self, name: &str) -> Option<&SortDecl> {
        self.sorts.iter().find(|s| s.name == name)
    }

    pub fn fluent_schema(&self, name: &str) -> Option<&Schema> {
        self.fluent_schemas.iter().find(|s| s.name == name)
    }

    pub fn action_schema(&self, name: &str) -> Option<&Schema> {
        self.action_schemas.iter().find(|s| s.name == name)
    }

    /// Sort that declares `constant`, if any.
    pub fn sort_of_constant(&self, constant: &str) -> Option<&SortDecl> {
        self.sorts
            .iter()
            .find(|s| s.constants.iter().any(|c| c == constant))
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.sorts {
            write!(f, "sort {} {{ ", s.name)?;
            write_list(f, &s.constants)?;
            writeln!(f, " }}.")?;
        }
        for s in &self.fluent_schemas {
            writeln!(f, "fluent {s}.")?;
        }
        for s in &self.action_schemas {
            writeln!(f, "action {s}.")?;
        }
        for law in &self.dynamic_laws {
            write!(f, "causes {}: ", law.action)?;
            write_list(f, &law.effects)?;
            write_body(f, &law.body)?;
            writeln!(f, ".")?;
        }
        for law in &self.static_laws {
            write!(f, "static {}", law.head)?;
            write_body(f, &law.body)?;
            writeln!(f, ".")?;
        }
        for law in &self.exec_conditions {
            write!(f, "exec {}", law.action)?;
            write_body(f, &law.body)?;
            writeln!(f, ".")?;
        }
        Ok(())
    }
}

/// Argument of an obligation: an action, or its negation (`obl(-a)`, "must not do").
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Duty<A> {
    pub action: A,
    pub refrain: bool,
}

impl<A: fmt::Display> fmt::Display for Duty<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.refrain {
            f.write_str("-")?;
        }
        write!(f, "{}", self.action)
    }
}

/// Head of a policy rule over some action representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Head<A> {
    /// `permitted(a)`
    Permitted(A),
    /// `-permitted(a)`
    Forbidden(A),
    /// `obl(h)`
    Obliged(Duty<A>),
    /// `-obl(h)`
    NotObliged(Duty<A>),
}

impl<A> Head<A> {
    pub fn action(&self) -> &A {
        match self {
            Head::Permitted(a) | Head::Forbidden(a) => a,
            Head::Obliged(d) | Head::NotObliged(d) => &d.action,
        }
    }

    pub fn map<B>(&self, f: impl FnOnce(&A) -> B) -> Head<B> {
        match self {
            Head::Permitted(a) => Head::Permitted(f(a)),
            Head::Forbidden(a) => Head::Forbidden(f(a)),
            Head::Obliged(d) => Head::Obliged(Duty {
                action: f(&d.action),
                refrain: d.refrain,
            }),
            Head::NotObliged(d) => Head::NotObliged(Duty {
                action: f(&d.action),
                refrain: d.refrain,
            }),
        }
    }
}

impl<A: Clone> Head<A> {
    /// The head that contradicts this one (`permitted` vs `-permitted`, `obl` vs `-obl`).
    pub fn complement(&self) -> Head<A> {
        match self {
            Head::Permitted(a) => Head::Forbidden(a.clone()),
            Head::Forbidden(a) => Head::Permitted(a.clone()),
            Head::Obliged(d) => Head::NotObliged(d.clone()),
            Head::NotObliged(d) => Head::Obliged(d.clone()),
        }
    }
}

impl<A: PartialEq + Clone> Head<A> {
    pub fn conflicts_with(&self, other: &Head<A>) -> bool {
        self.complement() == *other
    }
}

impl<A: fmt::Display> fmt::Display for Head<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Head::Permitted(a) => write!(f, "permitted({a})"),
            Head::Forbidden(a) => write!(f, "-permitted({a})"),
            Head::Obliged(d) => write!(f, "obl({d})"),
            Head::NotObliged(d) => write!(f, "-obl({d})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolicyRule {
    pub id: String,
    pub head: Head<Atom>,
    pub body: Vec<Condition>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolicySpec {
    pub strict_rules: Vec<PolicyRule>,
    pub defeasible_rules: Vec<PolicyRule>,
    /// `(stronger, weaker)` pairs of defeasible rule ids.
    pub preferences: Vec<(String, String)>,
    pub rule_penalties: BTreeMap<String, u8>,
    pub default_penalty: u8,
    pub weak_penalty: u64,
    pub max_penalty: Option<u64>,
}

pub const DEFAULT_RULE_PENALTY: u8 = 2;

impl Default for PolicySpec {
    fn default() -> Self {
        PolicySpec {
            strict_rules: Vec::new(),
            defeasible_rules: Vec::new(),
            preferences: Vec::new(),
            rule_penalties: BTreeMap::new(),
            default_penalty: DEFAULT_RULE_PENALTY,
            weak_penalty: 0,
            max_penalty: None,
        }
    }
}

impl PolicySpec {
    pub fn contains_rule(&self, id: &str) -> bool {
        self.strict_rules
            .iter()
            .chain(&self.defeasible_rules)
            .any(|r| r.id == id)
    }
}

impl fmt::Display for PolicySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.strict_rules {
            write!(f, "rule {}: {}", r.id, r.head)?;
            write_body(f, &r.body)?;
            writeln!(f, ".")?;
        }
        for r in &self.defeasible_rules {
            write!(f, "default {}: normally {}", r.id, r.head)?;
            write_body(f, &r.body)?;
            writeln!(f, ".")?;
        }
        for (a, b) in &self.preferences {
            writeln!(f, "prefer {a} {b}.")?;
        }
        for (id, p) in &self.rule_penalties {
            writeln!(f, "penalty {id} = {p}.")?;
        }
        writeln!(f, "penalty default = {}.", self.default_penalty)?;
        writeln!(f, "penalty weak = {}.", self.weak_penalty)?;
        if let Some(m) = self.max_penalty {
            writeln!(f, "max_penalty = {m}.")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Normal,
    Emergency,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Normal => "normal",
            Mode::Emergency => "emergency",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ProblemSpec {
    pub init: Vec<Literal>,
    pub goal: Vec<Literal>,
    pub horizon: usize,
    pub mode: Mode,
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("init ")?;
        write_list(f, &self.init)?;
        f.write_str(".\ngoal ")?;
        write_list(f, &self.goal)?;
        writeln!(f, ".\nhorizon {}.\nmode {}.", self.horizon, self.mode)
    }
}
