//! Bounded plan search and minimal-penalty plan selection.
//!
//! Search is an exhaustive depth-first walk over executable action sequences
//! of length `0..=horizon`. Subtrees below a fixed split depth are
//! independent, so they can be explored in parallel; results are merged in
//! subtree order and the selected plan is the same as a single-threaded run.
//!
//! Plans are ordered by total penalty, then length, then the lexicographic
//! order of their action ids (which is the order of the ground actions).

pub mod oracle;

pub use oracle::{brute_force_best, OracleError};

use crate::compliance::{classify_with, EventVerdict, TrajectoryVerdict};
use crate::dsl::{Mode, ProblemSpec};
use crate::ground::{ActionId, GroundDomain, GroundError, GroundLiteral, GroundPolicy};
use crate::penalty::{step_penalty, PenaltyConfig, ScoredPlan};
use crate::policy_eval::{evaluate_state, PolicyError, VerdictSet};
use crate::transition::{initial_state, successor, State, TransitionError};
use std::sync::atomic::{AtomicU64, Ordering};

pub const DEFAULT_SEARCH_BUDGET: u64 = 10_000_000;

/// Subtrees rooted at this depth are the unit of parallel work.
const SPLIT_DEPTH: usize = 2;

#[derive(Debug, Clone)]
pub struct PlanQuery {
    pub domain: GroundDomain,
    pub policy: GroundPolicy,
    pub config: PenaltyConfig,
    pub problem: ProblemSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Maximum number of search nodes (root plus every attempted successor).
    pub budget: u64,
    pub parallel: bool,
    /// Skip prefixes whose accumulated penalty already exceeds the best total
    /// found so far (or the cap in normal mode). Never changes the selected
    /// plan, but `considered` and `rejected_by_cap` then only count the plans
    /// actually reached.
    pub prune: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: DEFAULT_SEARCH_BUDGET,
            parallel: true,
            prune: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanResult {
    pub best: Option<ScoredPlan>,
    /// Goal-achieving plans examined.
    pub considered: u64,
    /// Goal-achieving plans discarded for exceeding `max_penalty` in normal mode.
    pub rejected_by_cap: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlanError {
    #[error(transparent)]
    Initial(#[from] TransitionError),
    #[error("goal: {0}")]
    Goal(#[from] GroundError),
    #[error("{message} (state {state})")]
    Policy {
        error: PolicyError,
        message: String,
        state: String,
    },
    #[error("search budget exceeded: more than {0} nodes")]
    BudgetExceeded(u64),
}

impl PlanQuery {
    /// The cap that applies to selection: none in emergency mode.
    pub fn effective_cap(&self) -> Option<u64> {
        match self.problem.mode {
            Mode::Normal => self.config.max_penalty,
            Mode::Emergency => None,
        }
    }

    fn goal(&self) -> Result<Vec<GroundLiteral>, GroundError> {
        self.problem
            .goal
            .iter()
            .map(|l| self.domain.resolve_literal(l))
            .collect()
    }
}

/// Partial plan on the DFS stack.
#[derive(Clone)]
struct Node {
    states: Vec<State>,
    actions: Vec<ActionId>,
    verdicts: Vec<EventVerdict>,
    penalties: Vec<u64>,
    acc: u64,
}

impl Node {
    fn root(s0: State) -> Self {
        Node {
            states: vec![s0],
            actions: Vec::new(),
            verdicts: Vec::new(),
            penalties: Vec::new(),
            acc: 0,
        }
    }

    fn state(&self) -> &State {
        self.states.last().expect("node has a state")
    }

    fn depth(&self) -> usize {
        self.actions.len()
    }

    fn push(&mut self, s: State, a: ActionId, ev: EventVerdict, pen: u64) {
        self.states.push(s);
        self.actions.push(a);
        self.verdicts.push(ev);
        self.penalties.push(pen);
        self.acc += pen;
    }

    fn pop(&mut self) {
        self.states.pop();
        self.actions.pop();
        self.verdicts.pop();
        self.acc -= self.penalties.pop().expect("nonempty");
    }

    fn scored(&self) -> ScoredPlan {
        ScoredPlan::new(
            self.actions.clone(),
            self.penalties.clone(),
            TrajectoryVerdict::from_steps(self.verdicts.clone()),
        )
    }
}

/// Receives goal-achieving nodes.
trait Sink: Send + Sync {
    fn goal(&mut self, node: &Node);
    /// Prefixes with accumulated penalty above this may be skipped.
    fn bound(&self) -> Option<u64>;
    fn merge(&mut self, other: Self);
    /// Empty sink for exploring one subtree. May keep what is needed for the bound.
    fn fresh(&self) -> Self;
}

struct Collect(Vec<ScoredPlan>);

impl Sink for Collect {
    fn goal(&mut self, node: &Node) {
        self.0.push(node.scored());
    }

    fn bound(&self) -> Option<u64> {
        None
    }

    fn merge(&mut self, other: Self) {
        self.0.extend(other.0);
    }

    fn fresh(&self) -> Self {
        Collect(Vec::new())
    }
}

struct Best {
    cap: Option<u64>,
    prune: bool,
    best: Option<ScoredPlan>,
    considered: u64,
    rejected: u64,
}

impl Best {
    fn offer(&mut self, plan: ScoredPlan) {
        let better = match &self.best {
            None => true,
            Some(b) => plan.key() < b.key(),
        };
        if better {
            self.best = Some(plan);
        }
    }
}

impl Sink for Best {
    fn goal(&mut self, node: &Node) {
        self.considered += 1;
        if self.cap.is_some_and(|c| node.acc > c) {
            self.rejected += 1;
            return;
        }
        let replace = match &self.best {
            None => true,
            Some(b) => (node.acc, node.depth(), node.actions.as_slice()) < b.key(),
        };
        if replace {
            self.best = Some(node.scored());
        }
    }

    fn bound(&self) -> Option<u64> {
        if !self.prune {
            return None;
        }
        match (self.best.as_ref().map(|b| b.total()), self.cap) {
            (Some(b), Some(c)) => Some(b.min(c)),
            (b, c) => b.or(c),
        }
    }

    fn merge(&mut self, other: Self) {
        self.considered += other.considered;
        self.rejected += other.rejected;
        if let Some(p) = other.best {
            self.offer(p);
        }
    }

    fn fresh(&self) -> Self {
        Best {
            cap: self.cap,
            prune: self.prune,
            best: if self.prune { self.best.clone() } else { None },
            considered: 0,
            rejected: 0,
        }
    }
}

struct Search<'a> {
    q: &'a PlanQuery,
    goal: Vec<GroundLiteral>,
    nodes: AtomicU64,
    budget: u64,
}

impl Search<'_> {
    fn tick(&self) -> Result<(), PlanError> {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if n > self.budget {
            Err(PlanError::BudgetExceeded(self.budget))
        } else {
            Ok(())
        }
    }

    fn policy_error(&self, error: PolicyError, s: &State) -> PlanError {
        PlanError::Policy {
            message: error.describe(&self.q.policy),
            state: s.display(&self.q.domain).to_string(),
            error,
        }
    }

    /// Explore below `node`. With `frontier`, nodes at `SPLIT_DEPTH` are handed
    /// back unexplored instead of being searched.
    fn dfs<S: Sink>(
        &self,
        node: &mut Node,
        sink: &mut S,
        mut frontier: Option<&mut Vec<Node>>,
    ) -> Result<(), PlanError> {
        if let Some(f) = frontier.as_deref_mut() {
            if node.depth() == SPLIT_DEPTH {
                f.push(node.clone());
                return Ok(());
            }
        }
        if node.state().holds_all(&self.goal) {
            sink.goal(node);
        }
        if node.depth() >= self.q.problem.horizon {
            return Ok(());
        }
        let dom = &self.q.domain;
        let mut verdicts: Option<VerdictSet> = None;
        for a in dom.action_ids() {
            self.tick()?;
            let Ok(next) = successor(node.state(), a, dom) else {
                continue;
            };
            if verdicts.is_none() {
                verdicts = Some(
                    evaluate_state(&self.q.policy, node.state())
                        .map_err(|e| self.policy_error(e, node.state()))?,
                );
            }
            let ev = classify_with(verdicts.as_ref().expect("computed"), a);
            let pen = step_penalty(&ev, &self.q.policy, &self.q.config);
            if sink.bound().is_some_and(|b| node.acc + pen > b) {
                continue;
            }
            node.push(next, a, ev, pen);
            let r = self.dfs(node, sink, frontier.as_deref_mut());
            node.pop();
            r?;
        }
        Ok(())
    }
}

fn run<S: Sink>(q: &PlanQuery, opts: &SearchOptions, mut sink: S) -> Result<S, PlanError> {
    let s0 = initial_state(&q.problem, &q.domain)?;
    let search = Search {
        q,
        goal: q.goal()?,
        nodes: AtomicU64::new(0),
        budget: opts.budget,
    };
    search.tick()?;
    let mut root = Node::root(s0);

    let parallel = opts.parallel && crate::exec::parallel_available();
    if !parallel {
        search.dfs(&mut root, &mut sink, None)?;
        return Ok(sink);
    }

    let mut frontier = Vec::new();
    search.dfs(&mut root, &mut sink, Some(&mut frontier))?;
    let template = sink.fresh();
    let parts = crate::exec::map_vec(frontier, true, |mut node| {
        let mut local = template.fresh();
        search.dfs(&mut node, &mut local, None).map(|()| local)
    });
    for part in parts {
        sink.merge(part?);
    }
    Ok(sink)
}

/// Every goal-achieving plan within the horizon, in selection order.
pub fn enumerate_plans(q: &PlanQuery) -> Result<Vec<ScoredPlan>, PlanError> {
    enumerate_plans_with(q, &SearchOptions::default())
}

pub fn enumerate_plans_with(
    q: &PlanQuery,
    opts: &SearchOptions,
) -> Result<Vec<ScoredPlan>, PlanError> {
    let mut plans = run(q, opts, Collect(Vec::new()))?.0;
    plans.sort_by(|a, b| a.key().cmp(&b.key()));
    Ok(plans)
}

/// The admissible plan with minimal (total, length, actions). In normal mode
/// plans above `max_penalty` are inadmissible; emergency mode lifts the cap.
pub fn best_plan(q: &PlanQuery) -> Result<PlanResult, PlanError> {
    best_plan_with(q, &SearchOptions::default())
}

pub fn best_plan_with(q: &PlanQuery, opts: &SearchOptions) -> Result<PlanResult, PlanError> {
    let sink = Best {
        cap: q.effective_cap(),
        prune: opts.prune,
        best: None,
        considered: 0,
        rejected: 0,
    };
    let done = run(q, opts, sink)?;
    Ok(PlanResult {
        best: done.best,
        considered: done.considered,
        rejected_by_cap: done.rejected,
    })
}
