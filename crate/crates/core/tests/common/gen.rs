//! Random small planning problems, emitted as DSL text.
//!
//! Shared by the property tests here and the acceptance suite of the CLI
//! crate (which includes this file by path). Every case respects the limits
//! of the exhaustive oracle: at most 6 ground fluents, at most 5 ground
//! actions, at most 3 policy rules and a horizon of at most 5.

#![allow(dead_code)]

use penplan::dsl::{parse_domain, parse_policy, parse_problem};
use penplan::ground::{ground_domain, ground_policy};
use penplan::penalty::PenaltyConfig;
use penplan::planner::PlanQuery;
use penplan::policy_eval::check_categorical;
use penplan::transition::initial_state;
use rand::seq::SliceRandom;
use rand::Rng;

pub const MAX_FLUENTS: usize = 6;
pub const MAX_ACTIONS: usize = 5;
pub const MAX_RULES: usize = 3;
pub const MAX_HORIZON: usize = 5;

#[derive(Debug, Clone)]
pub struct Case {
    pub dom: String,
    pub pol: String,
    pub prb: String,
}

impl Case {
    pub fn query(&self) -> PlanQuery {
        let domain = ground_domain(&parse_domain(&self.dom).unwrap()).unwrap();
        let spec = parse_policy(&self.pol).unwrap();
        PlanQuery {
            policy: ground_policy(&spec, &domain).unwrap(),
            config: PenaltyConfig::from_spec(&spec),
            domain,
            problem: parse_problem(&self.prb).unwrap(),
        }
    }
}

/// Ground vocabulary of a case before it is written out.
struct Vocab {
    /// Ground fluent atoms as written in the DSL.
    fluents: Vec<String>,
    actions: Vec<String>,
}

fn lit<R: Rng>(rng: &mut R, fluents: &[String]) -> String {
    let f = fluents.choose(rng).unwrap();
    if rng.gen_bool(0.5) {
        f.clone()
    } else {
        format!("-{f}")
    }
}

/// Up to `max` literals over distinct fluents.
fn lits<R: Rng>(rng: &mut R, fluents: &[String], min: usize, max: usize) -> Vec<String> {
    let n = rng.gen_range(min..=max.min(fluents.len()));
    let mut chosen: Vec<&String> = fluents.choose_multiple(rng, n).collect();
    chosen.sort();
    chosen
        .into_iter()
        .map(|f| {
            if rng.gen_bool(0.5) {
                f.clone()
            } else {
                format!("-{f}")
            }
        })
        .collect()
}

fn if_body(body: &[String]) -> String {
    if body.is_empty() {
        String::new()
    } else {
        format!(" if {}", body.join(", "))
    }
}

fn domain<R: Rng>(rng: &mut R) -> (String, Vocab) {
    let mut text = String::new();
    let mut fluents = Vec::new();
    let mut actions = Vec::new();

    // Optionally one sort with a unary fluent and a unary action over it.
    let sorted = rng.gen_bool(0.4);
    let prop_count = rng.gen_range(1..=if sorted { MAX_FLUENTS - 2 } else { MAX_FLUENTS });
    let act_count = rng.gen_range(1..=if sorted { MAX_ACTIONS - 2 } else { MAX_ACTIONS });
    if sorted {
        text.push_str("sort obj { o1, o2 }.\n");
    }
    for i in 0..prop_count {
        text.push_str(&format!("fluent f{i}.\n"));
        fluents.push(format!("f{i}"));
    }
    if sorted {
        text.push_str("fluent p(obj).\n");
        fluents.push("p(o1)".into());
        fluents.push("p(o2)".into());
    }
    for i in 0..act_count {
        text.push_str(&format!("action a{i}.\n"));
        actions.push(format!("a{i}"));
    }
    if sorted {
        text.push_str("action m(obj).\n");
        actions.push("m(o1)".into());
        actions.push("m(o2)".into());
    }

    for a in actions.iter().take(act_count) {
        for _ in 0..rng.gen_range(1..=2) {
            let effects = lits(rng, &fluents, 1, 2);
            let body = lits(rng, &fluents, 0, 2);
            text.push_str(&format!(
                "causes {a}: {}{}.\n",
                effects.join(", "),
                if_body(&body)
            ));
        }
    }
    if sorted {
        // one schematic law covering both instances
        let positive = rng.gen_bool(0.5);
        let extra = lits(rng, &fluents[..prop_count], 0, 1);
        let mut body = vec![if positive {
            "-p(X)".to_string()
        } else {
            "p(X)".to_string()
        }];
        body.extend(extra);
        let effect = if positive { "p(X)" } else { "-p(X)" };
        text.push_str(&format!("causes m(X): {effect}{}.\n", if_body(&body)));
    }
    if rng.gen_bool(0.3) {
        let body = lits(rng, &fluents, 1, 2);
        let head = lit(rng, &fluents);
        if !body
            .iter()
            .any(|b| b.trim_start_matches('-') == head.trim_start_matches('-'))
        {
            text.push_str(&format!("static {head}{}.\n", if_body(&body)));
        }
    }
    if rng.gen_bool(0.4) {
        let a = actions.choose(rng).unwrap();
        let body = lits(rng, &fluents, 1, 2);
        text.push_str(&format!("exec {a}{}.\n", if_body(&body)));
    }
    (text, Vocab { fluents, actions })
}

fn head<R: Rng>(rng: &mut R, actions: &[String]) -> String {
    let a = actions.choose(rng).unwrap();
    match rng.gen_range(0..5) {
        0 => format!("permitted({a})"),
        1 => format!("-permitted({a})"),
        2 => format!("obl({a})"),
        3 => format!("obl(-{a})"),
        _ => format!("-obl({a})"),
    }
}

fn policy<R: Rng>(rng: &mut R, v: &Vocab) -> String {
    let mut text = String::new();
    let n = rng.gen_range(0..=MAX_RULES);
    let mut defeasible = Vec::new();
    for i in 0..n {
        let h = head(rng, &v.actions);
        let body = lits(rng, &v.fluents, 0, 2);
        if rng.gen_bool(0.5) {
            text.push_str(&format!("rule r{i}: {h}{}.\n", if_body(&body)));
        } else {
            text.push_str(&format!("default r{i}: normally {h}{}.\n", if_body(&body)));
            defeasible.push(format!("r{i}"));
        }
        if rng.gen_bool(0.7) {
            text.push_str(&format!("penalty r{i} = {}.\n", rng.gen_range(1..=3)));
        }
    }
    if defeasible.len() >= 2 && rng.gen_bool(0.5) {
        let mut pair: Vec<_> = defeasible.choose_multiple(rng, 2).collect();
        pair.shuffle(rng);
        text.push_str(&format!("prefer {} {}.\n", pair[0], pair[1]));
    }
    if rng.gen_bool(0.5) {
        text.push_str(&format!("penalty default = {}.\n", rng.gen_range(1..=3)));
    }
    if rng.gen_bool(0.3) {
        text.push_str(&format!("penalty weak = {}.\n", rng.gen_range(0..=2)));
    }
    if rng.gen_bool(0.3) {
        text.push_str(&format!("max_penalty = {}.\n", rng.gen_range(0..=4)));
    }
    text
}

fn problem<R: Rng>(rng: &mut R, v: &Vocab) -> String {
    let init = lits(rng, &v.fluents, 0, v.fluents.len());
    let goal = lits(rng, &v.fluents, 1, 2);
    let horizon = rng.gen_range(0..=MAX_HORIZON);
    let mode = if rng.gen_bool(0.25) {
        " mode emergency."
    } else {
        ""
    };
    format!(
        "init {}.\ngoal {}.\nhorizon {horizon}.{mode}\n",
        init.join(", "),
        goal.join(", ")
    )
}

/// A case whose inputs parse and ground, whose initial state is consistent,
/// and whose policy is categorical at every state.
pub fn case<R: Rng>(rng: &mut R) -> Case {
    loop {
        let (dom, v) = domain(rng);
        let pol = policy(rng, &v);
        let prb = problem(rng, &v);
        let Ok(d) = parse_domain(&dom) else { continue };
        let Ok(g) = ground_domain(&d) else { continue };
        let Ok(p) = parse_policy(&pol) else { continue };
        let Ok(gp) = ground_policy(&p, &g) else {
            continue;
        };
        let Ok(pr) = parse_problem(&prb) else {
            continue;
        };
        if initial_state(&pr, &g).is_err() {
            continue;
        }
        if !check_categorical(&gp, &g).unwrap().is_empty() {
            continue;
        }
        assert!(g.fluents().len() <= MAX_FLUENTS && g.actions().len() <= MAX_ACTIONS);
        return Case { dom, pol, prb };
    }
}
