//! Expansion of schematic domains and policies into ground form.
//!
//! Ground fluents and actions are sorted by name, then arguments, and
//! identified by their index in that order. Every downstream loop iterates in
//! index order, which is what makes plans and tie-breaks reproducible.

use crate::dsl::{
    infer_variable_sorts, Atom, Condition, DomainSpec, Duty, Head, Literal, PolicySpec, Schema,
    SortDecl, Term, TypeIssue, VarSorts,
};
use std::collections::HashMap;
use std::fmt;

pub const DEFAULT_INSTANCE_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FluentId(pub u32);

impl FluentId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionId(pub u32);

impl ActionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A ground fluent atom or ground action: a name applied to constants.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub name: String,
    pub args: Vec<String>,
}

pub type GroundAction = GroundAtom;

impl GroundAtom {
    pub fn new(name: impl Into<String>, args: Vec<String>) -> Self {
        GroundAtom {
            name: name.into(),
            args,
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        crate::dsl::write_args(f, self.args.iter())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundLiteral {
    pub fluent: FluentId,
    pub positive: bool,
}

impl GroundLiteral {
    pub fn new(fluent: FluentId, positive: bool) -> Self {
        GroundLiteral { fluent, positive }
    }

    pub fn complement(self) -> Self {
        GroundLiteral {
            fluent: self.fluent,
            positive: !self.positive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroundDynamicLaw {
    pub action: ActionId,
    pub effects: Vec<GroundLiteral>,
    pub body: Vec<GroundLiteral>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroundStaticLaw {
    pub head: GroundLiteral,
    pub body: Vec<GroundLiteral>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroundExecCondition {
    pub action: ActionId,
    pub body: Vec<GroundLiteral>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroundError {
    #[error("domain too large: grounding exceeds the budget of {0} instances")]
    DomainTooLarge(u64),
    #[error("{context}: {issue}")]
    Type { context: String, issue: TypeIssue },
    #[error("rule '{rule}': unknown action '{action}'")]
    UnknownAction { rule: String, action: String },
    #[error("rule '{rule}': unknown fluent '{fluent}'")]
    UnknownFluent { rule: String, fluent: String },
    #[error("unknown fluent '{0}'")]
    UnknownGroundFluent(String),
    #[error("unknown action '{0}'")]
    UnknownGroundAction(String),
}

#[derive(Debug, Clone, Copy)]
pub struct GroundOptions {
    /// Upper bound on enumerated instances across the whole program.
    pub budget: u64,
}

impl Default for GroundOptions {
    fn default() -> Self {
        GroundOptions {
            budget: DEFAULT_INSTANCE_BUDGET,
        }
    }
}

/// Counts instances against the budget.
struct Budget {
    limit: u64,
    used: u64,
}

impl Budget {
    fn reserve(&mut self, n: u64) -> Result<(), GroundError> {
        self.used = self.used.saturating_add(n);
        if self.used > self.limit {
            Err(GroundError::DomainTooLarge(self.limit))
        } else {
            Ok(())
        }
    }
}

/// Calls `f` once per assignment of constants to `vars` that satisfies every
/// guard of `body`, in odometer order (last variable fastest).
fn for_each_assignment<F>(
    vars: &VarSorts,
    sorts: &[SortDecl],
    body: &[Condition],
    budget: &mut Budget,
    mut f: F,
) -> Result<(), GroundError>
where
    F: FnMut(&HashMap<&str, &str>) -> Result<(), GroundError>,
{
    let domains: Vec<&[String]> = vars
        .iter()
        .map(|(_, sort)| {
            sorts
                .iter()
                .find(|s| &s.name == sort)
                .map(|s| s.constants.as_slice())
                .unwrap_or(&[])
        })
        .collect();
    let product = domains
        .iter()
        .try_fold(1u64, |acc, d| acc.checked_mul(d.len() as u64))
        .ok_or(GroundError::DomainTooLarge(budget.limit))?;
    budget.reserve(product)?;
    if product == 0 {
        return Ok(());
    }

    let mut idx = vec![0usize; vars.len()];
    let mut env: HashMap<&str, &str> = HashMap::with_capacity(vars.len());
    loop {
        env.clear();
        for (k, (name, _)) in vars.iter().enumerate() {
            env.insert(name.as_str(), domains[k][idx[k]].as_str());
        }
        let guards_hold = body.iter().all(|c| match c {
            Condition::Neq(a, b) => resolve(a, &env) != resolve(b, &env),
            Condition::Lit(_) => true,
        });
        if guards_hold {
            f(&env)?;
        }
        // advance odometer
        let mut k = vars.len();
        loop {
            if k == 0 {
                return Ok(());
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < domains[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

fn resolve<'a>(t: &'a Term, env: &HashMap<&str, &'a str>) -> &'a str {
    match t {
        Term::Var(v) => env.get(v.as_str()).copied().unwrap_or(v.as_str()),
        Term::Const(c) => c.as_str(),
    }
}

fn instantiate(atom: &Atom, env: &HashMap<&str, &str>) -> GroundAtom {
    GroundAtom {
        name: atom.name.clone(),
        args: atom
            .args
            .iter()
            .map(|t| resolve(t, env).to_string())
            .collect(),
    }
}

fn schema_instances(
    schemas: &[Schema],
    sorts: &[SortDecl],
    budget: &mut Budget,
) -> Result<Vec<GroundAtom>, GroundError> {
    let mut out = Vec::new();
    for schema in schemas {
        let vars: VarSorts = schema
            .sorts
            .iter()
            .enumerate()
            .map(|(i, s)| (format!("V{i}"), s.clone()))
            .collect();
        let atom = Atom::new(
            schema.name.clone(),
            vars.iter().map(|(v, _)| Term::Var(v.clone())).collect(),
        );
        for_each_assignment(&vars, sorts, &[], budget, |env| {
            out.push(instantiate(&atom, env));
            Ok(())
        })?;
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// The ground transition-system vocabulary and laws.
#[derive(Debug, Clone)]
pub struct GroundDomain {
    sorts: Vec<SortDecl>,
    fluent_schemas: Vec<Schema>,
    action_schemas: Vec<Schema>,
    fluents: Vec<GroundAtom>,
    actions: Vec<GroundAction>,
    fluent_index: HashMap<GroundAtom, FluentId>,
    action_index: HashMap<GroundAtom, ActionId>,
    dynamic_laws: Vec<GroundDynamicLaw>,
    static_laws: Vec<GroundStaticLaw>,
    exec_conditions: Vec<GroundExecCondition>,
    laws_by_action: Vec<Vec<usize>>,
    exec_by_action: Vec<Vec<usize>>,
}

pub fn ground_domain(spec: &DomainSpec) -> Result<GroundDomain, GroundError> {
    ground_domain_with(spec, &GroundOptions::default())
}

pub fn ground_domain_with(
    spec: &DomainSpec,
    opts: &GroundOptions,
) -> Result<GroundDomain, GroundError> {
    let mut budget = Budget {
        limit: opts.budget,
        used: 0,
    };
    let sorts = &spec.sorts;
    let fluents = schema_instances(&spec.fluent_schemas, sorts, &mut budget)?;
    let fluent_index: HashMap<_, _> = fluents
        .iter()
        .enumerate()
        .map(|(i, a)| (a.clone(), FluentId(i as u32)))
        .collect();

    let fluent_sorts = |name: &str| -> Result<&[String], GroundError> {
        spec.fluent_schema(name)
            .map(|s| s.sorts.as_slice())
            .ok_or_else(|| GroundError::UnknownGroundFluent(name.to_string()))
    };
    let action_sorts = |name: &str| -> Result<&[String], GroundError> {
        spec.action_schema(name)
            .map(|s| s.sorts.as_slice())
            .ok_or_else(|| GroundError::UnknownGroundAction(name.to_string()))
    };
    let lit = |l: &Literal, env: &HashMap<&str, &str>| -> GroundLiteral {
        GroundLiteral::new(fluent_index[&instantiate(&l.atom, env)], l.positive)
    };
    let body_lits = |body: &[Condition], env: &HashMap<&str, &str>| -> Vec<GroundLiteral> {
        body.iter()
            .filter_map(|c| match c {
                Condition::Lit(l) => Some(lit(l, env)),
                Condition::Neq(..) => None,
            })
            .collect()
    };
    let type_law = |context: String,
                    action: Option<&Atom>,
                    heads: &[&Literal],
                    body: &[Condition]|
     -> Result<VarSorts, GroundError> {
        let mut typed: Vec<(&Atom, &[String])> = Vec::new();
        if let Some(a) = action {
            typed.push((a, action_sorts(&a.name)?));
        }
        for l in heads
            .iter()
            .copied()
            .chain(body.iter().filter_map(|c| match c {
                Condition::Lit(l) => Some(l),
                Condition::Neq(..) => None,
            }))
        {
            typed.push((&l.atom, fluent_sorts(&l.atom.name)?));
        }
        infer_variable_sorts(typed, body, sorts)
            .map_err(|issue| GroundError::Type { context, issue })
    };

    let mut dynamic_instances = Vec::new();
    for law in &spec.dynamic_laws {
        let heads: Vec<&Literal> = law.effects.iter().collect();
        let vars = type_law(
            format!("causes {}", law.action),
            Some(&law.action),
            &heads,
            &law.body,
        )?;
        for_each_assignment(&vars, sorts, &law.body, &mut budget, |env| {
            dynamic_instances.push((
                instantiate(&law.action, env),
                law.effects.iter().map(|l| lit(l, env)).collect::<Vec<_>>(),
                body_lits(&law.body, env),
            ));
            Ok(())
        })?;
    }

    // A schema with dynamic laws has exactly the instances those laws produce,
    // so guard-excluded combinations such as cruise(base, base) do not exist.
    // Schemas without dynamic laws keep every sort-respecting instance.
    let mut actions = Vec::new();
    for schema in &spec.action_schemas {
        let from_laws: Vec<GroundAtom> = dynamic_instances
            .iter()
            .filter(|(a, _, _)| a.name == schema.name)
            .map(|(a, _, _)| a.clone())
            .collect();
        if from_laws.is_empty() {
            actions.extend(schema_instances(
                std::slice::from_ref(schema),
                sorts,
                &mut budget,
            )?);
        } else {
            actions.extend(from_laws);
        }
    }
    actions.sort();
    actions.dedup();
    let action_index: HashMap<_, _> = actions
        .iter()
        .enumerate()
        .map(|(i, a)| (a.clone(), ActionId(i as u32)))
        .collect();
    let mut dynamic_laws: Vec<GroundDynamicLaw> = dynamic_instances
        .into_iter()
        .map(|(a, effects, body)| GroundDynamicLaw {
            action: action_index[&a],
            effects,
            body,
        })
        .collect();
    let mut static_laws = Vec::new();
    for law in &spec.static_laws {
        let vars = type_law(
            format!("static {}", law.head),
            None,
            &[&law.head],
            &law.body,
        )?;
        for_each_assignment(&vars, sorts, &law.body, &mut budget, |env| {
            static_laws.push(GroundStaticLaw {
                head: lit(&law.head, env),
                body: body_lits(&law.body, env),
            });
            Ok(())
        })?;
    }
    let mut exec_conditions = Vec::new();
    for law in &spec.exec_conditions {
        let vars = type_law(
            format!("exec {}", law.action),
            Some(&law.action),
            &[],
            &law.body,
        )?;
        for_each_assignment(&vars, sorts, &law.body, &mut budget, |env| {
            if let Some(&action) = action_index.get(&instantiate(&law.action, env)) {
                exec_conditions.push(GroundExecCondition {
                    action,
                    body: body_lits(&law.body, env),
                });
            }
            Ok(())
        })?;
    }
    dynamic_laws.sort();
    dynamic_laws.dedup();
    static_laws.sort();
    static_laws.dedup();
    exec_conditions.sort();
    exec_conditions.dedup();

    let mut laws_by_action = vec![Vec::new(); actions.len()];
    for (i, l) in dynamic_laws.iter().enumerate() {
        laws_by_action[l.action.index()].push(i);
    }
    let mut exec_by_action = vec![Vec::new(); actions.len()];
    for (i, l) in exec_conditions.iter().enumerate() {
        exec_by_action[l.action.index()].push(i);
    }

    Ok(GroundDomain {
        sorts: spec.sorts.clone(),
        fluent_schemas: spec.fluent_schemas.clone(),
        action_schemas: spec.action_schemas.clone(),
        fluents,
        actions,
        fluent_index,
        action_index,
        dynamic_laws,
        static_laws,
        exec_conditions,
        laws_by_action,
        exec_by_action,
    })
}

impl GroundDomain {
    pub fn fluents(&self) -> &[GroundAtom] {
        &self.fluents
    }

    pub fn actions(&self) -> &[GroundAction] {
        &self.actions
    }

    pub fn action_ids(&self) -> impl Iterator<Item = ActionId> + '_ {
        (0..self.actions.len() as u32).map(ActionId)
    }

    pub fn fluent_count(&self) -> usize {
        self.fluents.len()
    }

    pub fn fluent(&self, id: FluentId) -> &GroundAtom {
        &self.fluents[id.index()]
    }

    pub fn action(&self, id: ActionId) -> &GroundAction {
        &self.actions[id.index()]
    }

    pub fn fluent_id(&self, atom: &GroundAtom) -> Option<FluentId> {
        self.fluent_index.get(atom).copied()
    }

    pub fn action_id(&self, atom: &GroundAtom) -> Option<ActionId> {
        self.action_index.get(atom).copied()
    }

    pub fn sorts(&self) -> &[SortDecl] {
        &self.sorts
    }

    pub fn dynamic_laws(&self) -> &[GroundDynamicLaw] {
        &self.dynamic_laws
    }

    pub fn static_laws(&self) -> &[GroundStaticLaw] {
        &self.static_laws
    }

    pub fn exec_conditions(&self) -> &[GroundExecCondition] {
        &self.exec_conditions
    }

    pub fn dynamic_laws_for(&self, a: ActionId) -> impl Iterator<Item = &GroundDynamicLaw> {
        self.laws_by_action[a.index()]
            .iter()
            .map(|&i| &self.dynamic_laws[i])
    }

    pub fn exec_conditions_for(&self, a: ActionId) -> impl Iterator<Item = &GroundExecCondition> {
        self.exec_by_action[a.index()]
            .iter()
            .map(|&i| &self.exec_conditions[i])
    }

    /// Resolve a ground literal written in source syntax (no variables).
    pub fn resolve_literal(&self, l: &Literal) -> Result<GroundLiteral, GroundError> {
        let atom = ground_of(&l.atom);
        self.fluent_id(&atom)
            .map(|f| GroundLiteral::new(f, l.positive))
            .ok_or_else(|| GroundError::UnknownGroundFluent(atom.to_string()))
    }

    pub fn resolve_action(&self, a: &Atom) -> Result<ActionId, GroundError> {
        let atom = ground_of(a);
        self.action_id(&atom)
            .ok_or_else(|| GroundError::UnknownGroundAction(atom.to_string()))
    }

    pub fn literal_display(&self, l: GroundLiteral) -> String {
        let atom = self.fluent(l.fluent);
        if l.positive {
            atom.to_string()
        } else {
            format!("-{atom}")
        }
    }

    fn literals_display(&self, lits: &[GroundLiteral]) -> String {
        lits.iter()
            .map(|&l| self.literal_display(l))
            .collect::<Vec<_>>()
            .join(", ")
    }

    /// One line per ground fluent, action and law, in the fixed order.
    pub fn dump_lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        for f in &self.fluents {
            out.push(format!("fluent {f}."));
        }
        for a in &self.actions {
            out.push(format!("action {a}."));
        }
        let with_body = |head: String, body: &[GroundLiteral]| {
            if body.is_empty() {
                format!("{head}.")
            } else {
                format!("{head} if {}.", self.literals_display(body))
            }
        };
        for l in &self.dynamic_laws {
            out.push(with_body(
                format!(
                    "causes {}: {}",
                    self.action(l.action),
                    self.literals_display(&l.effects)
                ),
                &l.body,
            ));
        }
        for l in &self.static_laws {
            out.push(with_body(
                format!("static {}", self.literal_display(l.head)),
                &l.body,
            ));
        }
        for l in &self.exec_conditions {
            out.push(with_body(
                format!("exec {}", self.action(l.action)),
                &l.body,
            ));
        }
        out
    }
}

fn ground_of(a: &Atom) -> GroundAtom {
    GroundAtom::new(
        a.name.clone(),
        a.args.iter().map(|t| t.text().to_string()).collect(),
    )
}

/// Identifier of one ground instance of a schematic rule, printed `id@k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RuleInstance {
    pub rule: String,
    pub index: usize,
}

impl fmt::Display for RuleInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.rule, self.index)
    }
}

/// Index of a rule in [`GroundPolicy::rules`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RuleRef(pub u32);

impl RuleRef {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundRule {
    pub id: RuleInstance,
    pub defeasible: bool,
    pub head: Head<ActionId>,
    pub body: Vec<GroundLiteral>,
}

#[derive(Debug, Clone)]
pub struct GroundPolicy {
    rules: Vec<GroundRule>,
    preferences: Vec<(String, String)>,
    /// For each defeasible rule, the conflicting defeasible rules preferred over it.
    defeaters: Vec<Vec<RuleRef>>,
}

pub fn ground_policy(spec: &PolicySpec, dom: &GroundDomain) -> Result<GroundPolicy, GroundError> {
    ground_policy_with(spec, dom, &GroundOptions::default())
}

pub fn ground_policy_with(
    spec: &PolicySpec,
    dom: &GroundDomain,
    opts: &GroundOptions,
) -> Result<GroundPolicy, GroundError> {
    let mut budget = Budget {
        limit: opts.budget,
        used: 0,
    };
    let mut rules = Vec::new();
    let schematic = spec
        .strict_rules
        .iter()
        .map(|r| (r, false))
        .chain(spec.defeasible_rules.iter().map(|r| (r, true)));

    for (rule, defeasible) in schematic {
        let action = rule.head.action();
        let action_schema = dom
            .action_schemas
            .iter()
            .find(|s| s.name == action.name)
            .ok_or_else(|| GroundError::UnknownAction {
                rule: rule.id.clone(),
                action: action.name.clone(),
            })?;
        let mut typed: Vec<(&Atom, &[String])> = vec![(action, &action_schema.sorts)];
        for c in &rule.body {
            if let Condition::Lit(l) = c {
                let schema = dom
                    .fluent_schemas
                    .iter()
                    .find(|s| s.name == l.atom.name)
                    .ok_or_else(|| GroundError::UnknownFluent {
                        rule: rule.id.clone(),
                        fluent: l.atom.name.clone(),
                    })?;
                typed.push((&l.atom, &schema.sorts));
            }
        }
        let vars = infer_variable_sorts(typed, &rule.body, &dom.sorts).map_err(|issue| {
            GroundError::Type {
                context: format!("rule '{}'", rule.id),
                issue,
            }
        })?;

        // Instances naming an action that does not exist in the ground domain
        // are skipped.
        let mut k = 0usize;
        for_each_assignment(&vars, &dom.sorts, &rule.body, &mut budget, |env| {
            let Some(&act) = dom.action_index.get(&instantiate(action, env)) else {
                return Ok(());
            };
            let body = rule
                .body
                .iter()
                .filter_map(|c| match c {
                    Condition::Lit(l) => Some(GroundLiteral::new(
                        dom.fluent_index[&instantiate(&l.atom, env)],
                        l.positive,
                    )),
                    Condition::Neq(..) => None,
                })
                .collect();
            rules.push(GroundRule {
                id: RuleInstance {
                    rule: rule.id.clone(),
                    index: k,
                },
                defeasible,
                head: rule.head.map(|_| act),
                body,
            });
            k += 1;
            Ok(())
        })?;
    }

    let defeaters = rules
        .iter()
        .map(|d| {
            if !d.defeasible {
                return Vec::new();
            }
            rules
                .iter()
                .enumerate()
                .filter(|(_, e)| {
                    e.defeasible
                        && e.head.conflicts_with(&d.head)
                        && spec
                            .preferences
                            .iter()
                            .any(|(strong, weak)| *strong == e.id.rule && *weak == d.id.rule)
                })
                .map(|(i, _)| RuleRef(i as u32))
                .collect()
        })
        .collect();

    Ok(GroundPolicy {
        rules,
        preferences: spec.preferences.clone(),
        defeaters,
    })
}

impl GroundPolicy {
    pub fn empty() -> Self {
        GroundPolicy {
            rules: Vec::new(),
            preferences: Vec::new(),
            defeaters: Vec::new(),
        }
    }

    pub fn rules(&self) -> &[GroundRule] {
        &self.rules
    }

    pub fn rule(&self, r: RuleRef) -> &GroundRule {
        &self.rules[r.index()]
    }

    pub fn preferences(&self) -> &[(String, String)] {
        &self.preferences
    }

    pub fn defeaters(&self, r: RuleRef) -> &[RuleRef] {
        &self.defeaters[r.index()]
    }

    pub fn head_display(&self, dom: &GroundDomain, head: &Head<ActionId>) -> String {
        head.map(|&a| dom.action(a).clone()).to_string()
    }

    pub fn dump_lines(&self, dom: &GroundDomain) -> Vec<String> {
        let mut out = Vec::new();
        for r in &self.rules {
            let (kw, normally) = if r.defeasible {
                ("default", "normally ")
            } else {
                ("rule", "")
            };
            let mut line = format!(
                "{kw} {}: {normally}{}",
                r.id,
                self.head_display(dom, &r.head)
            );
            if !r.body.is_empty() {
                line.push_str(" if ");
                line.push_str(&dom.literals_display(&r.body));
            }
            line.push('.');
            out.push(line);
        }
        for (a, b) in &self.preferences {
            out.push(format!("prefer {a} {b}."));
        }
        out
    }
}

/// Obligation over a ground action.
pub type GroundDuty = Duty<ActionId>;
