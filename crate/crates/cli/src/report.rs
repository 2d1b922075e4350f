//! Run reports: the JSON contract and its plain-text rendering.

use penplan::compliance::{EventVerdict, TrajectoryVerdict};
use penplan::ground::{GroundDomain, GroundPolicy};
use penplan::penalty::ScoredPlan;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;

#[derive(Debug, Serialize)]
pub struct Report<R> {
    pub command: String,
    pub inputs: Vec<Input>,
    pub result: Option<R>,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct Input {
    pub path: String,
    pub sha256: String,
}

impl Input {
    pub fn new(path: &str, bytes: &[u8]) -> Self {
        Input {
            path: path.to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Violation {
    pub rule: String,
    pub literal: String,
}

#[derive(Debug, Serialize)]
pub struct Step {
    /// 1-based.
    pub step: usize,
    pub action: String,
    pub auth: &'static str,
    pub auth_rule: Option<String>,
    pub obl_violations: Vec<Violation>,
    pub penalty: u64,
}

#[derive(Debug, Serialize)]
pub struct PlanView {
    pub actions: Vec<String>,
    pub length: usize,
    pub total: u64,
    pub auth_overall: &'static str,
    pub obl_overall: &'static str,
    pub steps: Vec<Step>,
}

fn step_view(
    dom: &GroundDomain,
    pol: &GroundPolicy,
    i: usize,
    ev: &EventVerdict,
    pen: u64,
) -> Step {
    Step {
        step: i + 1,
        action: dom.action(ev.action).to_string(),
        auth: ev.auth_class.as_str(),
        auth_rule: ev.auth_rule.map(|r| pol.rule(r).id.rule.clone()),
        obl_violations: ev
            .obl_violations
            .iter()
            .map(|v| Violation {
                rule: pol.rule(v.rule).id.rule.clone(),
                literal: pol.head_display(dom, &penplan::dsl::Head::Obliged(v.duty)),
            })
            .collect(),
        penalty: pen,
    }
}

impl PlanView {
    pub fn new(dom: &GroundDomain, pol: &GroundPolicy, plan: &ScoredPlan) -> Self {
        let v: &TrajectoryVerdict = plan.verdict();
        PlanView {
            actions: plan
                .actions()
                .iter()
                .map(|&a| dom.action(a).to_string())
                .collect(),
            length: plan.len(),
            total: plan.total(),
            auth_overall: v.auth_overall.as_str(),
            obl_overall: v.obl_overall.as_str(),
            steps: v
                .steps
                .iter()
                .zip(plan.step_penalties())
                .enumerate()
                .map(|(i, (ev, &pen))| step_view(dom, pol, i, ev, pen))
                .collect(),
        }
    }

    fn render(&self, out: &mut String) {
        let plan = if self.actions.is_empty() {
            "(empty)".to_string()
        } else {
            self.actions.join("; ")
        };
        let _ = writeln!(out, "plan: {plan}");
        let _ = writeln!(out, "length: {}  total: {}", self.length, self.total);
        let _ = writeln!(
            out,
            "auth: {}  obligations: {}",
            self.auth_overall, self.obl_overall
        );
        if self.steps.is_empty() {
            return;
        }
        let rows: Vec<[String; 6]> = self
            .steps
            .iter()
            .map(|s| {
                let obl = if s.obl_violations.is_empty() {
                    "-".to_string()
                } else {
                    s.obl_violations
                        .iter()
                        .map(|v| format!("{} ({})", v.literal, v.rule))
                        .collect::<Vec<_>>()
                        .join(", ")
                };
                [
                    s.step.to_string(),
                    s.action.clone(),
                    s.auth.to_string(),
                    s.auth_rule.clone().unwrap_or_else(|| "-".into()),
                    obl,
                    s.penalty.to_string(),
                ]
            })
            .collect();
        table(
            out,
            [
                "step",
                "action",
                "auth",
                "rule",
                "violated obligations",
                "penalty",
            ],
            &rows,
        );
    }
}

fn table<const N: usize>(out: &mut String, header: [&str; N], rows: &[[String; N]]) {
    let mut width = header.map(str::len);
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let mut line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, (c, w)) in cells.iter().zip(width).enumerate() {
            if i + 1 == N {
                s.push_str(c);
            } else {
                let _ = write!(s, "{c:<w$}  ");
            }
        }
        let _ = writeln!(out, "{}", s.trim_end());
    };
    line(header.to_vec());
    for r in rows {
        line(r.iter().map(String::as_str).collect());
    }
}

#[derive(Debug, Serialize)]
pub struct PlanOutcome {
    pub mode: String,
    pub max_penalty: Option<u64>,
    pub best: Option<PlanView>,
    pub considered: u64,
    pub rejected_by_cap: u64,
}

#[derive(Debug, Serialize)]
pub struct CheckOutcome {
    pub plan: PlanView,
    pub goal_reached: bool,
    pub max_penalty: Option<u64>,
    pub disabled: bool,
}

#[derive(Debug, Serialize)]
pub struct Offending {
    pub state: String,
    pub error: String,
}

#[derive(Debug, Serialize)]
pub struct ValidateOutcome {
    pub fluents: usize,
    pub actions: usize,
    pub rules: usize,
    pub states_checked: u64,
    pub categorical: bool,
    pub offending: Vec<Offending>,
}

#[derive(Debug, Serialize)]
pub struct Listed {
    pub actions: Vec<String>,
    pub length: usize,
    pub total: u64,
    pub admissible: bool,
}

#[derive(Debug, Serialize)]
pub struct EnumerateOutcome {
    pub max_penalty: Option<u64>,
    pub count: usize,
    pub plans: Vec<Listed>,
}

#[derive(Debug, Serialize)]
pub struct GroundOutcome {
    pub fluents: usize,
    pub actions: usize,
    pub rules: usize,
    pub lines: Vec<String>,
}

/// Plain-text mirror of a result payload.
pub trait Render {
    fn render(&self, out: &mut String);
}

fn cap_text(cap: Option<u64>) -> String {
    cap.map_or_else(|| "none".to_string(), |c| c.to_string())
}

impl Render for PlanOutcome {
    fn render(&self, out: &mut String) {
        let _ = writeln!(
            out,
            "mode: {}  max_penalty: {}",
            self.mode,
            cap_text(self.max_penalty)
        );
        let _ = writeln!(
            out,
            "considered: {}  rejected_by_cap: {}",
            self.considered, self.rejected_by_cap
        );
        match &self.best {
            Some(p) => p.render(out),
            None => {
                let _ = writeln!(out, "no admissible plan");
            }
        }
    }
}

impl Render for CheckOutcome {
    fn render(&self, out: &mut String) {
        self.plan.render(out);
        let _ = writeln!(out, "goal reached: {}", self.goal_reached);
        let _ = writeln!(
            out,
            "max_penalty: {}  disabled: {}",
            cap_text(self.max_penalty),
            self.disabled
        );
    }
}

impl Render for ValidateOutcome {
    fn render(&self, out: &mut String) {
        let _ = writeln!(
            out,
            "{} fluents, {} actions, {} ground rules, {} states checked",
            self.fluents, self.actions, self.rules, self.states_checked
        );
        if self.categorical {
            let _ = writeln!(out, "policy is categorical");
            return;
        }
        let _ = writeln!(out, "{} offending states:", self.offending.len());
        for o in &self.offending {
            let _ = writeln!(out, "  {}: {}", o.state, o.error);
        }
    }
}

impl Render for EnumerateOutcome {
    fn render(&self, out: &mut String) {
        let _ = writeln!(
            out,
            "{} plans  max_penalty: {}",
            self.count,
            cap_text(self.max_penalty)
        );
        let rows: Vec<[String; 4]> = self
            .plans
            .iter()
            .map(|p| {
                [
                    p.total.to_string(),
                    p.length.to_string(),
                    if p.admissible { "yes" } else { "no" }.to_string(),
                    if p.actions.is_empty() {
                        "(empty)".to_string()
                    } else {
                        p.actions.join("; ")
                    },
                ]
            })
            .collect();
        if !rows.is_empty() {
            table(out, ["total", "length", "admissible", "plan"], &rows);
        }
    }
}

impl Render for GroundOutcome {
    fn render(&self, out: &mut String) {
        for l in &self.lines {
            let _ = writeln!(out, "{l}");
        }
    }
}
