//! Penalties for non-compliant steps and their aggregate over a plan.

use crate::compliance::{
    classify_trajectory, AuthClass, EventVerdict, StepPolicyError, TrajectoryVerdict,
};
use crate::dsl::PolicySpec;
use crate::ground::{ActionId, GroundPolicy, RuleRef};
use crate::transition::Trajectory;
use std::collections::BTreeMap;
use std::fmt;

/// Severity of a rule violation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PenaltyLevel {
    Low = 1,
    Medium = 2,
    High = 3,
}

impl PenaltyLevel {
    pub fn points(self) -> u64 {
        self as u64
    }

    /// One level up, saturating at `High`.
    pub fn raised(self) -> Self {
        match self {
            PenaltyLevel::Low => PenaltyLevel::Medium,
            _ => PenaltyLevel::High,
        }
    }
}

impl TryFrom<u64> for PenaltyLevel {
    type Error = u64;

    fn try_from(n: u64) -> Result<Self, u64> {
        match n {
            1 => Ok(PenaltyLevel::Low),
            2 => Ok(PenaltyLevel::Medium),
            3 => Ok(PenaltyLevel::High),
            other => Err(other),
        }
    }
}

impl fmt::Display for PenaltyLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PenaltyLevel::Low => "low",
            PenaltyLevel::Medium => "medium",
            PenaltyLevel::High => "high",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PenaltyConfig {
    pub rule_penalties: BTreeMap<String, PenaltyLevel>,
    /// Used for violated rules without a declared penalty.
    pub default_penalty: PenaltyLevel,
    /// Charged for each weakly compliant step.
    pub weak_penalty: u64,
    /// Plans above this total are inadmissible in normal mode.
    pub max_penalty: Option<u64>,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        PenaltyConfig {
            rule_penalties: BTreeMap::new(),
            default_penalty: PenaltyLevel::Medium,
            weak_penalty: 0,
            max_penalty: None,
        }
    }
}

impl PenaltyConfig {
    /// Settings declared in a parsed policy. Levels outside 1..=3 fall back
    /// to the default level; the parser never produces them.
    pub fn from_spec(spec: &PolicySpec) -> Self {
        let default_penalty =
            PenaltyLevel::try_from(spec.default_penalty as u64).unwrap_or(PenaltyLevel::Medium);
        PenaltyConfig {
            rule_penalties: spec
                .rule_penalties
                .iter()
                .map(|(id, &n)| {
                    (
                        id.clone(),
                        PenaltyLevel::try_from(n as u64).unwrap_or(default_penalty),
                    )
                })
                .collect(),
            default_penalty,
            weak_penalty: spec.weak_penalty,
            max_penalty: spec.max_penalty,
        }
    }

    /// Penalty of a schematic rule id.
    pub fn rule_penalty(&self, rule: &str) -> PenaltyLevel {
        self.rule_penalties
            .get(rule)
            .copied()
            .unwrap_or(self.default_penalty)
    }

    pub fn exceeds_cap(&self, total: u64) -> bool {
        self.max_penalty.is_some_and(|cap| total > cap)
    }
}

pub fn step_penalty(ev: &EventVerdict, p: &GroundPolicy, cfg: &PenaltyConfig) -> u64 {
    let of = |r: RuleRef| cfg.rule_penalty(&p.rule(r).id.rule).points();
    let auth = match ev.auth_class {
        AuthClass::NonCompliant => ev.auth_rule.map(of).unwrap_or(cfg.default_penalty.points()),
        AuthClass::Weak => cfg.weak_penalty,
        AuthClass::Strong => 0,
    };
    auth + ev.obl_violations.iter().map(|v| of(v.rule)).sum::<u64>()
}

pub fn total_penalty(steps: &[u64]) -> u64 {
    steps.iter().sum()
}

/// A plan with its per-step penalties. The total is always the sum of the
/// step penalties; the fields are private to keep it that way.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoredPlan {
    actions: Vec<ActionId>,
    step_penalties: Vec<u64>,
    total: u64,
    verdict: TrajectoryVerdict,
}

impl ScoredPlan {
    /// Panics if the lengths of `actions`, `step_penalties` and the verdict's
    /// steps disagree.
    pub fn new(
        actions: Vec<ActionId>,
        step_penalties: Vec<u64>,
        verdict: TrajectoryVerdict,
    ) -> Self {
        assert_eq!(actions.len(), step_penalties.len(), "one penalty per step");
        assert_eq!(actions.len(), verdict.steps.len(), "one verdict per step");
        let total = total_penalty(&step_penalties);
        ScoredPlan {
            actions,
            step_penalties,
            total,
            verdict,
        }
    }

    pub fn actions(&self) -> &[ActionId] {
        &self.actions
    }

    pub fn step_penalties(&self) -> &[u64] {
        &self.step_penalties
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn verdict(&self) -> &TrajectoryVerdict {
        &self.verdict
    }

    /// Selection key: total, then length, then actions in lexicographic order.
    pub fn key(&self) -> (u64, usize, &[ActionId]) {
        (self.total, self.actions.len(), &self.actions)
    }
}

pub fn score_plan(
    p: &GroundPolicy,
    cfg: &PenaltyConfig,
    t: &Trajectory,
) -> Result<ScoredPlan, StepPolicyError> {
    let verdict = classify_trajectory(p, t)?;
    let steps = verdict
        .steps
        .iter()
        .map(|ev| step_penalty(ev, p, cfg))
        .collect();
    Ok(ScoredPlan::new(t.actions.clone(), steps, verdict))
}
