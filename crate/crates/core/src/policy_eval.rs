//! Policy conclusions at a single state.
//!
//! Evaluation has two layers. Strict rules fire whenever their bodies hold.
//! A defeasible rule fires when its body holds, the complement of its head was
//! not concluded strictly, and no conflicting defeasible rule with a holding
//! body is declared preferred over it. Preferences are used as declared, not
//! transitively closed.

use crate::dsl::Head;
use crate::ground::{ActionId, GroundDomain, GroundDuty, GroundPolicy, RuleRef};
use crate::transition::{is_closed, State};
use std::collections::BTreeMap;

pub const DEFAULT_CHECK_BOUND: usize = 20;

/// Which rules entail `permitted(a)` and `-permitted(a)` for one action.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AuthEntailment {
    pub permitted_by: Vec<RuleRef>,
    pub forbidden_by: Vec<RuleRef>,
}

impl AuthEntailment {
    pub fn entailed_permitted(&self) -> bool {
        !self.permitted_by.is_empty()
    }

    pub fn entailed_not_permitted(&self) -> bool {
        !self.forbidden_by.is_empty()
    }
}

/// Everything the policy concludes at one state.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerdictSet {
    pub auth: BTreeMap<ActionId, AuthEntailment>,
    /// `obl(h)` conclusions with the rules producing each.
    pub obligations: BTreeMap<GroundDuty, Vec<RuleRef>>,
    /// `-obl(h)` conclusions. They only block conflicting defeasible obligations.
    pub waivers: BTreeMap<GroundDuty, Vec<RuleRef>>,
    /// Rules whose heads were concluded, in rule order.
    pub fired: Vec<RuleRef>,
}

impl VerdictSet {
    pub fn auth_for(&self, a: ActionId) -> Option<&AuthEntailment> {
        self.auth.get(&a)
    }

    fn record(&mut self, r: RuleRef, head: &Head<ActionId>) {
        match head {
            Head::Permitted(a) => self.auth.entry(*a).or_default().permitted_by.push(r),
            Head::Forbidden(a) => self.auth.entry(*a).or_default().forbidden_by.push(r),
            Head::Obliged(d) => self.obligations.entry(*d).or_default().push(r),
            Head::NotObliged(d) => self.waivers.entry(*d).or_default().push(r),
        }
        self.fired.push(r);
    }

    fn contains(&self, head: &Head<ActionId>) -> bool {
        match head {
            Head::Permitted(a) => self.auth.get(a).is_some_and(|e| e.entailed_permitted()),
            Head::Forbidden(a) => self.auth.get(a).is_some_and(|e| e.entailed_not_permitted()),
            Head::Obliged(d) => self.obligations.contains_key(d),
            Head::NotObliged(d) => self.waivers.contains_key(d),
        }
    }

    fn first_rule_for(&self, head: &Head<ActionId>) -> Option<RuleRef> {
        match head {
            Head::Permitted(a) => self
                .auth
                .get(a)
                .and_then(|e| e.permitted_by.first().copied()),
            Head::Forbidden(a) => self
                .auth
                .get(a)
                .and_then(|e| e.forbidden_by.first().copied()),
            Head::Obliged(d) => self.obligations.get(d).and_then(|v| v.first().copied()),
            Head::NotObliged(d) => self.waivers.get(d).and_then(|v| v.first().copied()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolicyError {
    #[error("inconsistent policy at state: rules {0:?} and {1:?} conclude contradictory heads")]
    Inconsistent(RuleRef, RuleRef),
    #[error(
        "non-categorical policy at state: defaults {0:?} and {1:?} conflict with no preference"
    )]
    NonCategorical(RuleRef, RuleRef),
}

impl PolicyError {
    pub fn rules(&self) -> (RuleRef, RuleRef) {
        match *self {
            PolicyError::Inconsistent(a, b) | PolicyError::NonCategorical(a, b) => (a, b),
        }
    }

    /// Message with rule ids resolved.
    pub fn describe(&self, p: &GroundPolicy) -> String {
        let (a, b) = self.rules();
        let (a, b) = (&p.rule(a).id, &p.rule(b).id);
        match self {
            PolicyError::Inconsistent(..) => {
                format!("inconsistent policy at state: {a} and {b} conclude contradictory heads")
            }
            PolicyError::NonCategorical(..) => {
                format!("non-categorical policy at state: {a} and {b} conflict with no preference")
            }
        }
    }
}

pub fn evaluate_state(p: &GroundPolicy, s: &State) -> Result<VerdictSet, PolicyError> {
    let mut v = VerdictSet::default();
    let refs = || (0..p.rules().len() as u32).map(RuleRef);

    for r in refs() {
        let rule = p.rule(r);
        if rule.defeasible || !s.holds_all(&rule.body) {
            continue;
        }
        if let Some(other) = v.first_rule_for(&rule.head.complement()) {
            return Err(PolicyError::Inconsistent(other, r));
        }
        v.record(r, &rule.head);
    }

    let survivors: Vec<RuleRef> = refs()
        .filter(|&r| {
            let rule = p.rule(r);
            rule.defeasible
                && s.holds_all(&rule.body)
                && !v.contains(&rule.head.complement())
                && !p.defeaters(r).iter().any(|&d| s.holds_all(&p.rule(d).body))
        })
        .collect();
    for (i, &r) in survivors.iter().enumerate() {
        let head = &p.rule(r).head;
        if let Some(&other) = survivors[..i]
            .iter()
            .find(|&&o| p.rule(o).head.conflicts_with(head))
        {
            return Err(PolicyError::NonCategorical(other, r));
        }
    }
    for r in survivors {
        v.record(r, &p.rule(r).head);
    }

    for (duty, by) in &v.obligations {
        if duty.refrain {
            continue;
        }
        let opposite = GroundDuty {
            action: duty.action,
            refrain: true,
        };
        if let Some(other) = v.obligations.get(&opposite) {
            return Err(PolicyError::Inconsistent(by[0], other[0]));
        }
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error(
    "state space too large for exhaustive check: {fluents} fluents exceeds the bound of {bound}"
)]
pub struct StateSpaceTooLarge {
    pub fluents: usize,
    pub bound: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    pub max_fluents: usize,
    pub parallel: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            max_fluents: DEFAULT_CHECK_BOUND,
            parallel: true,
        }
    }
}

/// Evaluate the policy at every complete, statically closed state and report
/// each state where evaluation fails. States are visited in order of their
/// bit encoding (fluent `i` is bit `i`).
pub fn check_categorical(
    p: &GroundPolicy,
    dom: &GroundDomain,
) -> Result<Vec<(State, PolicyError)>, StateSpaceTooLarge> {
    check_categorical_with(p, dom, &CheckOptions::default())
}

pub fn check_categorical_with(
    p: &GroundPolicy,
    dom: &GroundDomain,
    opts: &CheckOptions,
) -> Result<Vec<(State, PolicyError)>, StateSpaceTooLarge> {
    let n = dom.fluent_count();
    if n > opts.max_fluents || n >= 64 {
        return Err(StateSpaceTooLarge {
            fluents: n,
            bound: opts.max_fluents,
        });
    }
    let check = |bits: u64| {
        let s = State::from_bits(n, bits);
        if !is_closed(&s, dom) {
            return None;
        }
        evaluate_state(p, &s).err().map(|e| (s, e))
    };
    Ok(crate::exec::filter_map_range(
        1u64 << n,
        opts.parallel,
        check,
    ))
}
