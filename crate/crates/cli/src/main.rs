//! `penplan`: parse, check and plan over policy-aware planning domains.
//!
//! Exit codes: 0 success, 1 input error, 2 compliance or validation failure,
//! 3 no plan, 4 budget exceeded.

mod report;

use clap::{Args, Parser, Subcommand};
use penplan::dsl::{self, DslError, Mode, PolicySpec};
use penplan::ground::{ground_domain, ground_policy, GroundDomain, GroundError, GroundPolicy};
use penplan::penalty::{score_plan, PenaltyConfig, PenaltyLevel};
use penplan::planner::{best_plan_with, enumerate_plans_with, PlanError, PlanQuery, SearchOptions};
use penplan::policy_eval::check_categorical;
use penplan::transition::{initial_state, simulate, TransitionError};
use report::*;
use serde::Serialize;
use std::io::Write;
use std::process::ExitCode;

const EXIT_INPUT: u8 = 1;
const EXIT_FAILED: u8 = 2;
const EXIT_NO_PLAN: u8 = 3;
const EXIT_BUDGET: u8 = 4;

#[derive(Parser)]
#[command(
    name = "penplan",
    version,
    about = "Policy-aware planning with penalties"
)]
struct Cli {
    /// Print the run report as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Copy, Default)]
struct Overrides {
    /// Plans above this total are inadmissible in normal mode.
    #[arg(long, global = true)]
    max_penalty: Option<u64>,
    /// Penalty of rules without a declared one.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..=3))]
    default_penalty: Option<u64>,
    /// Penalty charged for each weakly compliant step.
    #[arg(long, global = true)]
    weak_penalty: Option<u64>,
    /// Maximum number of search nodes.
    #[arg(long, global = true)]
    budget: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Find the admissible plan with minimal total penalty.
    Plan {
        domain: String,
        policy: String,
        problem: String,
        #[command(flatten)]
        over: Overrides,
    },
    /// Classify and score a given plan.
    Check {
        domain: String,
        policy: String,
        problem: String,
        /// Semicolon-separated ground actions.
        #[arg(long)]
        plan: String,
        #[command(flatten)]
        over: Overrides,
    },
    /// Check that the policy is categorical at every state.
    Validate { domain: String, policy: String },
    /// List every goal-achieving plan within the horizon in selection order.
    Enumerate {
        domain: String,
        policy: String,
        problem: String,
        #[command(flatten)]
        over: Overrides,
    },
    /// Print the ground domain and, if given, the ground policy.
    Ground {
        domain: String,
        policy: Option<String>,
    },
}

/// A run that stopped before producing a result.
struct Fail {
    code: u8,
    diagnostic: String,
}

impl Fail {
    fn input(diagnostic: impl Into<String>) -> Self {
        Fail {
            code: EXIT_INPUT,
            diagnostic: diagnostic.into(),
        }
    }
}

struct Done<R> {
    result: R,
    code: u8,
    diagnostics: Vec<String>,
}

impl<R> Done<R> {
    fn ok(result: R) -> Self {
        Done {
            result,
            code: 0,
            diagnostics: Vec::new(),
        }
    }
}

#[derive(Default)]
struct Session {
    inputs: Vec<Input>,
}

impl Session {
    fn read(&mut self, path: &str) -> Result<String, Fail> {
        let bytes =
            std::fs::read(path).map_err(|e| Fail::input(format!("{path}: cannot read: {e}")))?;
        self.inputs.push(Input::new(path, &bytes));
        String::from_utf8(bytes).map_err(|_| Fail::input(format!("{path}: not valid UTF-8")))
    }

    fn parse<T>(&mut self, path: &str, f: fn(&str) -> Result<T, DslError>) -> Result<T, Fail> {
        let text = self.read(path)?;
        f(&text).map_err(|e| Fail::input(format!("{path}:{e}")))
    }
}

fn ground_fail(path: &str, e: GroundError) -> Fail {
    let code = match e {
        GroundError::DomainTooLarge(_) => EXIT_BUDGET,
        _ => EXIT_INPUT,
    };
    Fail {
        code,
        diagnostic: format!("{path}: {e}"),
    }
}

struct Loaded {
    domain: GroundDomain,
    policy: GroundPolicy,
    spec: PolicySpec,
}

fn load(s: &mut Session, dom: &str, pol: &str) -> Result<Loaded, Fail> {
    let dspec = s.parse(dom, dsl::parse_domain)?;
    let pspec = s.parse(pol, dsl::parse_policy)?;
    let domain = ground_domain(&dspec).map_err(|e| ground_fail(dom, e))?;
    let policy = ground_policy(&pspec, &domain).map_err(|e| ground_fail(pol, e))?;
    Ok(Loaded {
        domain,
        policy,
        spec: pspec,
    })
}

fn config(spec: &PolicySpec, over: &Overrides) -> PenaltyConfig {
    let mut cfg = PenaltyConfig::from_spec(spec);
    if let Some(m) = over.max_penalty {
        cfg.max_penalty = Some(m);
    }
    if let Some(level) = over
        .default_penalty
        .and_then(|d| PenaltyLevel::try_from(d).ok())
    {
        cfg.default_penalty = level;
    }
    if let Some(w) = over.weak_penalty {
        cfg.weak_penalty = w;
    }
    cfg
}

fn query(
    s: &mut Session,
    dom: &str,
    pol: &str,
    prb: &str,
    over: &Overrides,
) -> Result<PlanQuery, Fail> {
    let l = load(s, dom, pol)?;
    let problem = s.parse(prb, dsl::parse_problem)?;
    Ok(PlanQuery {
        config: config(&l.spec, over),
        domain: l.domain,
        policy: l.policy,
        problem,
    })
}

fn search_options(over: &Overrides) -> SearchOptions {
    let mut opts = SearchOptions::default();
    if let Some(b) = over.budget {
        opts.budget = b;
    }
    opts
}

fn plan_fail(e: PlanError, pol: &str, prb: &str) -> Fail {
    match e {
        PlanError::BudgetExceeded(_) => Fail {
            code: EXIT_BUDGET,
            diagnostic: e.to_string(),
        },
        PlanError::Policy { .. } => Fail::input(format!("{pol}: {e}")),
        PlanError::Initial(_) | PlanError::Goal(_) => Fail::input(format!("{prb}: {e}")),
    }
}

fn mode_name(m: Mode) -> String {
    m.to_string()
}

fn cmd_plan(
    s: &mut Session,
    dom: &str,
    pol: &str,
    prb: &str,
    over: &Overrides,
) -> Result<Done<PlanOutcome>, Fail> {
    let q = query(s, dom, pol, prb, over)?;
    let r = best_plan_with(&q, &search_options(over)).map_err(|e| plan_fail(e, pol, prb))?;
    let found = r.best.is_some();
    let result = PlanOutcome {
        mode: mode_name(q.problem.mode),
        max_penalty: q.effective_cap(),
        best: r
            .best
            .as_ref()
            .map(|p| PlanView::new(&q.domain, &q.policy, p)),
        considered: r.considered,
        rejected_by_cap: r.rejected_by_cap,
    };
    if found {
        return Ok(Done::ok(result));
    }
    let why = if r.rejected_by_cap > 0 {
        format!(
            "no plan: every goal-achieving plan exceeds max_penalty ({} rejected)",
            r.rejected_by_cap
        )
    } else {
        format!(
            "no plan: goal unreachable within horizon {}",
            q.problem.horizon
        )
    };
    Ok(Done {
        result,
        code: EXIT_NO_PLAN,
        diagnostics: vec![why],
    })
}

fn cmd_check(
    s: &mut Session,
    paths: [&str; 3],
    plan: &str,
    over: &Overrides,
) -> Result<Done<CheckOutcome>, Fail> {
    let [dom, pol, prb] = paths;
    let q = query(s, dom, pol, prb, over)?;
    let mut ids = Vec::new();
    for part in plan.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let term = dsl::parse_action_term(part)
            .map_err(|e| Fail::input(format!("--plan: '{part}': {}", e.kind)))?;
        let id = q
            .domain
            .resolve_action(&term)
            .map_err(|_| Fail::input(format!("--plan: unknown action '{part}'")))?;
        ids.push(id);
    }
    let s0 =
        initial_state(&q.problem, &q.domain).map_err(|e| Fail::input(format!("{prb}: {e}")))?;
    let t = simulate(&s0, &ids, &q.domain).map_err(|e| {
        let what = match e.source {
            TransitionError::NotExecutable(_) => "not executable",
            _ => "inconsistent effects",
        };
        Fail::input(format!("--plan: {what} at step {}: {}", e.step, e.source))
    })?;
    let scored = score_plan(&q.policy, &q.config, &t).map_err(|e| {
        Fail::input(format!(
            "{pol}: step {}: {}",
            e.step,
            e.source.describe(&q.policy)
        ))
    })?;
    let goal_reached = q
        .problem
        .goal
        .iter()
        .map(|l| q.domain.resolve_literal(l))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Fail::input(format!("{prb}: goal: {e}")))?
        .iter()
        .all(|&l| t.last().holds(l));
    let disabled = q.config.exceeds_cap(scored.total());
    let v = scored.verdict();
    let compliant = v.auth_overall != penplan::compliance::AuthClass::NonCompliant
        && v.obl_overall == penplan::compliance::OblStatus::Compliant;
    let mut diagnostics = Vec::new();
    if !compliant {
        diagnostics.push(format!(
            "plan is not compliant: total penalty {}",
            scored.total()
        ));
    }
    if disabled {
        diagnostics.push(format!(
            "total penalty {} exceeds max_penalty {}: agent disabled",
            scored.total(),
            q.config.max_penalty.unwrap_or_default()
        ));
    }
    Ok(Done {
        result: CheckOutcome {
            plan: PlanView::new(&q.domain, &q.policy, &scored),
            goal_reached,
            max_penalty: q.config.max_penalty,
            disabled,
        },
        code: if compliant { 0 } else { EXIT_FAILED },
        diagnostics,
    })
}

fn cmd_validate(s: &mut Session, dom: &str, pol: &str) -> Result<Done<ValidateOutcome>, Fail> {
    let l = load(s, dom, pol)?;
    let bad = check_categorical(&l.policy, &l.domain).map_err(|e| Fail {
        code: EXIT_BUDGET,
        diagnostic: format!("{dom}: {e}"),
    })?;
    let n = l.domain.fluent_count();
    let offending: Vec<Offending> = bad
        .iter()
        .map(|(st, e)| Offending {
            state: st.display(&l.domain).to_string(),
            error: e.describe(&l.policy),
        })
        .collect();
    let result = ValidateOutcome {
        fluents: n,
        actions: l.domain.actions().len(),
        rules: l.policy.rules().len(),
        states_checked: 1u64 << n,
        categorical: offending.is_empty(),
        offending,
    };
    if result.categorical {
        return Ok(Done::ok(result));
    }
    let diag = format!(
        "{pol}: policy is not categorical in {} states",
        result.offending.len()
    );
    Ok(Done {
        result,
        code: EXIT_FAILED,
        diagnostics: vec![diag],
    })
}

fn cmd_enumerate(
    s: &mut Session,
    dom: &str,
    pol: &str,
    prb: &str,
    over: &Overrides,
) -> Result<Done<EnumerateOutcome>, Fail> {
    let q = query(s, dom, pol, prb, over)?;
    let plans =
        enumerate_plans_with(&q, &search_options(over)).map_err(|e| plan_fail(e, pol, prb))?;
    let cap = q.effective_cap();
    let listed: Vec<Listed> = plans
        .iter()
        .map(|p| Listed {
            actions: p
                .actions()
                .iter()
                .map(|&a| q.domain.action(a).to_string())
                .collect(),
            length: p.len(),
            total: p.total(),
            admissible: cap.is_none_or(|c| p.total() <= c),
        })
        .collect();
    let empty = listed.is_empty();
    let result = EnumerateOutcome {
        max_penalty: cap,
        count: listed.len(),
        plans: listed,
    };
    if !empty {
        return Ok(Done::ok(result));
    }
    Ok(Done {
        result,
        code: EXIT_NO_PLAN,
        diagnostics: vec![format!(
            "no plan: goal unreachable within horizon {}",
            q.problem.horizon
        )],
    })
}

fn cmd_ground(s: &mut Session, dom: &str, pol: Option<&str>) -> Result<Done<GroundOutcome>, Fail> {
    let dspec = s.parse(dom, dsl::parse_domain)?;
    let domain = ground_domain(&dspec).map_err(|e| ground_fail(dom, e))?;
    let mut lines = domain.dump_lines();
    let mut rules = 0;
    if let Some(pol) = pol {
        let pspec = s.parse(pol, dsl::parse_policy)?;
        let policy = ground_policy(&pspec, &domain).map_err(|e| ground_fail(pol, e))?;
        rules = policy.rules().len();
        lines.extend(policy.dump_lines(&domain));
    }
    Ok(Done::ok(GroundOutcome {
        fluents: domain.fluent_count(),
        actions: domain.actions().len(),
        rules,
        lines,
    }))
}

fn emit<R: Serialize + Render>(
    json: bool,
    command: String,
    s: Session,
    run: Result<Done<R>, Fail>,
) -> ExitCode {
    let (result, code, diagnostics) = match run {
        Ok(d) => (Some(d.result), d.code, d.diagnostics),
        Err(f) => (None, f.code, vec![f.diagnostic]),
    };
    let mut out = String::new();
    if json {
        let report = Report {
            command,
            inputs: s.inputs,
            result,
            diagnostics,
        };
        out = serde_json::to_string_pretty(&report).expect("report serializes");
        out.push('\n');
    } else {
        if let Some(r) = &result {
            r.render(&mut out);
        }
        for d in &diagnostics {
            eprintln!("penplan: {d}");
        }
    }
    let _ = std::io::stdout().write_all(out.as_bytes());
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let mut s = Session::default();
    let json = cli.json;
    match &cli.cmd {
        Cmd::Plan {
            domain,
            policy,
            problem,
            over,
        } => {
            let r = cmd_plan(&mut s, domain, policy, problem, over);
            emit(json, command, s, r)
        }
        Cmd::Check {
            domain,
            policy,
            problem,
            plan,
            over,
        } => {
            let r = cmd_check(&mut s, [domain, policy, problem], plan, over);
            emit(json, command, s, r)
        }
        Cmd::Validate { domain, policy } => {
            let r = cmd_validate(&mut s, domain, policy);
            emit(json, command, s, r)
        }
        Cmd::Enumerate {
            domain,
            policy,
            problem,
            over,
        } => {
            let r = cmd_enumerate(&mut s, domain, policy, problem, over);
            emit(json, command, s, r)
        }
        Cmd::Ground { domain, policy } => {
            let r = cmd_ground(&mut s, domain, policy.as_deref());
            emit(json, command, s, r)
        }
    }
}
