//! The transition diagram: complete states, executability and deterministic
//! successors.
//!
//! A successor is computed from the direct effects `E` of the fired dynamic
//! laws. Static laws are then closed to a fixpoint over `E`, evaluating bodies
//! against the candidate state in which every literal of the source state
//! persists unless its complement has been derived. Nothing derived may
//! contradict `E` or anything else derived.

use crate::dsl::ProblemSpec;
use crate::ground::{ActionId, FluentId, GroundDomain, GroundError, GroundLiteral};
use std::fmt;

/// A complete truth assignment to the ground fluents, indexed by [`FluentId`].
///
/// Completeness and consistency hold by construction; closure under static
/// laws is checked with [`is_closed`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    values: Vec<bool>,
}

impl State {
    pub fn from_values(values: Vec<bool>) -> Self {
        State { values }
    }

    /// All-false state over `n` fluents.
    pub fn all_false(n: usize) -> Self {
        State {
            values: vec![false; n],
        }
    }

    /// State whose fluent `i` is bit `i` of `bits`.
    pub fn from_bits(n: usize, bits: u64) -> Self {
        State {
            values: (0..n).map(|i| bits >> i & 1 == 1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, f: FluentId) -> bool {
        self.values[f.index()]
    }

    pub fn holds(&self, l: GroundLiteral) -> bool {
        self.values[l.fluent.index()] == l.positive
    }

    pub fn holds_all(&self, lits: &[GroundLiteral]) -> bool {
        lits.iter().all(|&l| self.holds(l))
    }

    /// One literal per fluent, in fluent order.
    pub fn literals(&self) -> impl Iterator<Item = GroundLiteral> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| GroundLiteral::new(FluentId(i as u32), v))
    }

    pub fn display<'a>(&'a self, dom: &'a GroundDomain) -> StateDisplay<'a> {
        StateDisplay { state: self, dom }
    }
}

pub struct StateDisplay<'a> {
    state: &'a State,
    dom: &'a GroundDomain,
}

impl fmt::Display for StateDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, l) in self.state.literals().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&self.dom.literal_display(l))?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransitionError {
    #[error("'{0}' is not executable")]
    NotExecutable(String),
    #[error("inconsistent effects on '{0}'")]
    InconsistentEffects(String),
    #[error("inconsistent initial state: '{0}' derived both ways")]
    InconsistentInitialState(String),
    #[error(transparent)]
    Ground(#[from] GroundError),
}

/// Result of one transition, with the literals that drove it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub state: State,
    /// Direct effects of the fired dynamic laws.
    pub effects: Vec<GroundLiteral>,
    /// Effects plus everything static closure derived, in fluent order.
    pub derived: Vec<GroundLiteral>,
}

/// Static closure over `seed`, with `base` supplying inertial values.
/// Returns the resulting state and the derived set, or the fluent on which a
/// contradiction arose.
fn close(
    dom: &GroundDomain,
    base: &State,
    seed: &[GroundLiteral],
) -> Result<(State, Vec<GroundLiteral>), FluentId> {
    let mut derived: Vec<Option<bool>> = vec![None; base.len()];
    let insert = |derived: &mut Vec<Option<bool>>, l: GroundLiteral| -> Result<bool, FluentId> {
        match derived[l.fluent.index()] {
            Some(v) if v == l.positive => Ok(false),
            Some(_) => Err(l.fluent),
            None => {
                derived[l.fluent.index()] = Some(l.positive);
                Ok(true)
            }
        }
    };
    for &l in seed {
        insert(&mut derived, l)?;
    }
    loop {
        let candidate = State {
            values: derived
                .iter()
                .zip(&base.values)
                .map(|(d, &b)| d.unwrap_or(b))
                .collect(),
        };
        let fired: Vec<GroundLiteral> = dom
            .static_laws()
            .iter()
            .filter(|law| candidate.holds_all(&law.body))
            .map(|law| law.head)
            .collect();
        let mut changed = false;
        for l in fired {
            changed |= insert(&mut derived, l)?;
        }
        if !changed {
            let lits = derived
                .iter()
                .enumerate()
                .filter_map(|(i, d)| d.map(|v| GroundLiteral::new(FluentId(i as u32), v)))
                .collect();
            return Ok((candidate, lits));
        }
    }
}

/// Closed-world completion of the problem's init, then static closure.
pub fn initial_state(prb: &ProblemSpec, dom: &GroundDomain) -> Result<State, TransitionError> {
    let init = prb
        .init
        .iter()
        .map(|l| dom.resolve_literal(l))
        .collect::<Result<Vec<_>, _>>()?;
    let base = State::all_false(dom.fluent_count());
    close(dom, &base, &init)
        .map(|(s, _)| s)
        .map_err(|f| TransitionError::InconsistentInitialState(dom.fluent(f).to_string()))
}

/// True iff every static law whose body holds in `s` has its head in `s`.
pub fn is_closed(s: &State, dom: &GroundDomain) -> bool {
    dom.static_laws()
        .iter()
        .all(|law| !s.holds_all(&law.body) || s.holds(law.head))
}

pub fn executable_in(s: &State, a: ActionId, dom: &GroundDomain) -> bool {
    dom.exec_conditions_for(a).all(|c| s.holds_all(&c.body))
}

pub fn successor(s: &State, a: ActionId, dom: &GroundDomain) -> Result<State, TransitionError> {
    successor_detailed(s, a, dom).map(|t| t.state)
}

pub fn successor_detailed(
    s: &State,
    a: ActionId,
    dom: &GroundDomain,
) -> Result<Transition, TransitionError> {
    if !executable_in(s, a, dom) {
        return Err(TransitionError::NotExecutable(dom.action(a).to_string()));
    }
    let effects: Vec<GroundLiteral> = dom
        .dynamic_laws_for(a)
        .filter(|law| s.holds_all(&law.body))
        .flat_map(|law| law.effects.iter().copied())
        .collect();
    let (state, derived) = close(dom, s, &effects)
        .map_err(|f| TransitionError::InconsistentEffects(dom.fluent(f).to_string()))?;
    Ok(Transition {
        state,
        effects,
        derived,
    })
}

/// `states.len() == actions.len() + 1`, each state the successor of the previous.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub states: Vec<State>,
    pub actions: Vec<ActionId>,
}

impl Trajectory {
    pub fn last(&self) -> &State {
        self.states
            .last()
            .expect("trajectory has at least one state")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("step {step}: {source}")]
pub struct SimulationError {
    /// 0-based index of the failing action in the plan.
    pub step: usize,
    pub source: TransitionError,
}

pub fn simulate(
    s0: &State,
    plan: &[ActionId],
    dom: &GroundDomain,
) -> Result<Trajectory, SimulationError> {
    let mut states = Vec::with_capacity(plan.len() + 1);
    states.push(s0.clone());
    for (step, &a) in plan.iter().enumerate() {
        let next = successor(states.last().expect("nonempty"), a, dom)
            .map_err(|source| SimulationError { step, source })?;
        states.push(next);
    }
    Ok(Trajectory {
        states,
        actions: plan.to_vec(),
    })
}
