//! Compliance classification of events and trajectories.
//!
//! Authorization compliance has three classes; obligation compliance has two.

use crate::ground::{ActionId, GroundDuty, GroundPolicy, RuleRef};
use crate::policy_eval::{evaluate_state, PolicyError, VerdictSet};
use crate::transition::{State, Trajectory};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AuthClass {
    Strong,
    Weak,
    NonCompliant,
}

impl AuthClass {
    pub fn as_str(self) -> &'static str {
        match self {
            AuthClass::Strong => "strong",
            AuthClass::Weak => "weak",
            AuthClass::NonCompliant => "non_compliant",
        }
    }
}

impl fmt::Display for AuthClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OblStatus {
    Compliant,
    NonCompliant,
}

impl OblStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            OblStatus::Compliant => "compliant",
            OblStatus::NonCompliant => "non_compliant",
        }
    }
}

impl fmt::Display for OblStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An obligation that held at the source state and was not honoured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OblViolation {
    pub rule: RuleRef,
    pub duty: GroundDuty,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventVerdict {
    pub action: ActionId,
    pub auth_class: AuthClass,
    /// Rule justifying a strong or non-compliant class.
    pub auth_rule: Option<RuleRef>,
    /// Sorted by rule, then duty.
    pub obl_violations: Vec<OblViolation>,
}

impl EventVerdict {
    pub fn obl_status(&self) -> OblStatus {
        if self.obl_violations.is_empty() {
            OblStatus::Compliant
        } else {
            OblStatus::NonCompliant
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrajectoryVerdict {
    pub steps: Vec<EventVerdict>,
    pub auth_overall: AuthClass,
    pub obl_overall: OblStatus,
}

impl TrajectoryVerdict {
    /// Aggregate per-step verdicts. An empty trajectory is strongly compliant.
    pub fn from_steps(steps: Vec<EventVerdict>) -> Self {
        let auth_overall = steps
            .iter()
            .map(|s| s.auth_class)
            .max()
            .unwrap_or(AuthClass::Strong);
        let obl_overall = if steps.iter().all(|s| s.obl_violations.is_empty()) {
            OblStatus::Compliant
        } else {
            OblStatus::NonCompliant
        };
        TrajectoryVerdict {
            steps,
            auth_overall,
            obl_overall,
        }
    }
}

fn auth_with_rule(v: &VerdictSet, a: ActionId) -> (AuthClass, Option<RuleRef>) {
    match v.auth_for(a) {
        Some(e) if e.entailed_not_permitted() => {
            (AuthClass::NonCompliant, e.forbidden_by.first().copied())
        }
        Some(e) if e.entailed_permitted() => (AuthClass::Strong, e.permitted_by.first().copied()),
        _ => (AuthClass::Weak, None),
    }
}

pub fn classify_auth(v: &VerdictSet, a: ActionId) -> AuthClass {
    auth_with_rule(v, a).0
}

/// `obl(e)` is violated when `e` is not the action taken; `obl(-e)` when it is.
pub fn classify_obl(v: &VerdictSet, a: ActionId) -> Vec<OblViolation> {
    let mut out: Vec<OblViolation> = v
        .obligations
        .iter()
        .filter(|(duty, _)| (duty.action == a) == duty.refrain)
        .flat_map(|(duty, rules)| rules.iter().map(|&rule| OblViolation { rule, duty: *duty }))
        .collect();
    out.sort();
    out
}

/// Classify an event given the verdict set already computed for its source state.
pub fn classify_with(v: &VerdictSet, a: ActionId) -> EventVerdict {
    let (auth_class, auth_rule) = auth_with_rule(v, a);
    EventVerdict {
        action: a,
        auth_class,
        auth_rule,
        obl_violations: classify_obl(v, a),
    }
}

pub fn classify_event(
    p: &GroundPolicy,
    s: &State,
    a: ActionId,
) -> Result<EventVerdict, PolicyError> {
    Ok(classify_with(&evaluate_state(p, s)?, a))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("step {step}: {source}")]
pub struct StepPolicyError {
    pub step: usize,
    pub source: PolicyError,
}

pub fn classify_trajectory(
    p: &GroundPolicy,
    t: &Trajectory,
) -> Result<TrajectoryVerdict, StepPolicyError> {
    let steps = t
        .actions
        .iter()
        .enumerate()
        .map(|(step, &a)| {
            classify_event(p, &t.states[step], a).map_err(|source| StepPolicyError { step, source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TrajectoryVerdict::from_steps(steps))
}
