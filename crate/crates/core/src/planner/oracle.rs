//! Brute-force reference for [`super::best_plan`].
//!
//! Generates every action sequence of length `0..=horizon`, executable or
//! not, and keeps the ones `simulate` accepts and that reach the goal. Policy
//! evaluation, classification and penalties are recomputed here in straight
//! line code; nothing from the search or scoring path is reused.

use super::PlanResult;
use crate::compliance::{AuthClass, EventVerdict, OblViolation, TrajectoryVerdict};
use crate::dsl::{Head, Mode};
use crate::ground::{ActionId, GroundDuty, GroundError, GroundPolicy, RuleRef};
use crate::penalty::{PenaltyConfig, ScoredPlan};
use crate::transition::{initial_state, simulate, State, TransitionError};

pub const MAX_SEQUENCES: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("{actions}^{horizon} sequences exceed the oracle bound of {MAX_SEQUENCES}")]
    TooLarge { actions: usize, horizon: usize },
    #[error(transparent)]
    Initial(#[from] TransitionError),
    #[error("goal: {0}")]
    Goal(#[from] GroundError),
    #[error("policy is not categorical at a state on a goal-reaching plan")]
    Policy,
}

/// Heads concluded at `s`, each with the rule that produced it, in rule order.
fn conclusions(p: &GroundPolicy, s: &State) -> Result<Vec<(RuleRef, Head<ActionId>)>, OracleError> {
    let holds = |body: &[crate::ground::GroundLiteral]| body.iter().all(|&l| s.holds(l));
    let rules = p.rules();

    let mut strict = Vec::new();
    for (i, r) in rules.iter().enumerate() {
        if !r.defeasible && holds(&r.body) {
            strict.push((RuleRef(i as u32), r.head));
        }
    }
    for (i, (_, a)) in strict.iter().enumerate() {
        for (_, b) in &strict[i + 1..] {
            if a.complement() == *b {
                return Err(OracleError::Policy);
            }
        }
    }

    let mut survivors = Vec::new();
    for (i, d) in rules.iter().enumerate() {
        if !d.defeasible || !holds(&d.body) {
            continue;
        }
        if strict.iter().any(|(_, h)| *h == d.head.complement()) {
            continue;
        }
        let defeated = rules.iter().any(|e| {
            e.defeasible
                && holds(&e.body)
                && e.head == d.head.complement()
                && p.preferences()
                    .iter()
                    .any(|(hi, lo)| *hi == e.id.rule && *lo == d.id.rule)
        });
        if !defeated {
            survivors.push((RuleRef(i as u32), d.head));
        }
    }
    for (i, (_, a)) in survivors.iter().enumerate() {
        for (_, b) in &survivors[i + 1..] {
            if a.complement() == *b {
                return Err(OracleError::Policy);
            }
        }
    }

    let mut all = strict;
    all.extend(survivors);
    for (_, h) in &all {
        if let Head::Obliged(d) = h {
            let opposite = Head::Obliged(GroundDuty {
                action: d.action,
                refrain: !d.refrain,
            });
            if all.iter().any(|(_, o)| *o == opposite) {
                return Err(OracleError::Policy);
            }
        }
    }
    all.sort_by_key(|(r, _)| *r);
    Ok(all)
}

fn rule_points(p: &GroundPolicy, cfg: &PenaltyConfig, r: RuleRef) -> u64 {
    let id = &p.rules()[r.0 as usize].id.rule;
    match cfg.rule_penalties.get(id) {
        Some(level) => *level as u64,
        None => cfg.default_penalty as u64,
    }
}

fn score_event(
    p: &GroundPolicy,
    cfg: &PenaltyConfig,
    s: &State,
    a: ActionId,
) -> Result<(EventVerdict, u64), OracleError> {
    let concl = conclusions(p, s)?;
    let forbidden = concl
        .iter()
        .find(|(_, h)| *h == Head::Forbidden(a))
        .map(|(r, _)| *r);
    let permitted = concl
        .iter()
        .find(|(_, h)| *h == Head::Permitted(a))
        .map(|(r, _)| *r);
    let (auth_class, auth_rule, mut points) = if let Some(r) = forbidden {
        (AuthClass::NonCompliant, Some(r), rule_points(p, cfg, r))
    } else if let Some(r) = permitted {
        (AuthClass::Strong, Some(r), 0)
    } else {
        (AuthClass::Weak, None, cfg.weak_penalty)
    };

    let mut obl_violations = Vec::new();
    for (r, h) in &concl {
        if let Head::Obliged(d) = h {
            let violated = if d.refrain {
                d.action == a
            } else {
                d.action != a
            };
            if violated {
                obl_violations.push(OblViolation { rule: *r, duty: *d });
                points += rule_points(p, cfg, *r);
            }
        }
    }
    obl_violations.sort();
    Ok((
        EventVerdict {
            action: a,
            auth_class,
            auth_rule,
            obl_violations,
        },
        points,
    ))
}

pub fn brute_force_best(q: &super::PlanQuery) -> Result<PlanResult, OracleError> {
    let n = q.domain.actions().len() as u64;
    let h = q.problem.horizon;
    let too_large = OracleError::TooLarge {
        actions: n as usize,
        horizon: h,
    };
    if n.checked_pow(h as u32).is_none_or(|w| w > MAX_SEQUENCES) {
        return Err(too_large);
    }

    let s0 = initial_state(&q.problem, &q.domain)?;
    let goal = q
        .problem
        .goal
        .iter()
        .map(|l| q.domain.resolve_literal(l))
        .collect::<Result<Vec<_>, _>>()?;
    let cap = match q.problem.mode {
        Mode::Normal => q.config.max_penalty,
        Mode::Emergency => None,
    };

    let mut considered = 0u64;
    let mut rejected = 0u64;
    let mut best: Option<ScoredPlan> = None;

    for len in 0..=h {
        let count = n.pow(len as u32);
        for code in 0..count {
            // most significant digit first, so codes run in lexicographic order
            let mut seq = vec![ActionId(0); len];
            let mut rest = code;
            for slot in seq.iter_mut().rev() {
                *slot = ActionId((rest % n.max(1)) as u32);
                rest /= n.max(1);
            }
            let Ok(traj) = simulate(&s0, &seq, &q.domain) else {
                continue;
            };
            if !goal.iter().all(|&l| traj.last().holds(l)) {
                continue;
            }
            considered += 1;
            let mut verdicts = Vec::new();
            let mut points = Vec::new();
            let mut total = 0u64;
            for (i, &a) in seq.iter().enumerate() {
                let (ev, pts) = score_event(&q.policy, &q.config, &traj.states[i], a)?;
                verdicts.push(ev);
                points.push(pts);
                total += pts;
            }
            if let Some(c) = cap {
                if total > c {
                    rejected += 1;
                    continue;
                }
            }
            // Lengths ascend and codes run lexicographically, so only a
            // strictly smaller total can displace the incumbent.
            if best.as_ref().is_none_or(|b| total < b.total()) {
                let plan = ScoredPlan::new(seq, points, TrajectoryVerdict::from_steps(verdicts));
                debug_assert_eq!(plan.total(), total);
                best = Some(plan);
            }
        }
    }

    Ok(PlanResult {
        best,
        considered,
        rejected_by_cap: rejected,
    })
}
