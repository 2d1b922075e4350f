use super::ast::{Atom, Condition, SortDecl, Term};
use std::fmt;

/// Variables of one law or rule with the sort each is bound to, in order of
/// first typed occurrence.
pub type VarSorts = Vec<(String, String)>;

/// A sort/arity problem found while typing a schematic atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeIssue {
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    UndeclaredConstant(String),
    SortMismatch {
        term: String,
        expected: String,
        found: String,
    },
    VariableSortConflict {
        var: String,
        first: String,
        second: String,
    },
    UntypedVariable(String),
}

impl fmt::Display for TypeIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeIssue::Arity {
                name,
                expected,
                found,
            } => write!(f, "'{name}' expects {expected} argument(s), found {found}"),
            TypeIssue::UndeclaredConstant(c) => write!(f, "undeclared constant '{c}'"),
            TypeIssue::SortMismatch {
                term,
                expected,
                found,
            } => write!(f, "'{term}' has sort '{found}', expected '{expected}'"),
            TypeIssue::VariableSortConflict { var, first, second } => {
                write!(
                    f,
                    "variable '{var}' used with sorts '{first}' and '{second}'"
                )
            }
            TypeIssue::UntypedVariable(v) => write!(f, "untyped variable '{v}'"),
        }
    }
}

/// Check one atom's arguments against its schema's sorts, recording variable sorts.
pub(crate) fn type_atom(
    atom: &Atom,
    schema: &[String],
    sorts: &[SortDecl],
    vars: &mut VarSorts,
) -> Result<(), TypeIssue> {
    if atom.args.len() != schema.len() {
        return Err(TypeIssue::Arity {
            name: atom.name.clone(),
            expected: schema.len(),
            found: atom.args.len(),
        });
    }
    for (term, sort) in atom.args.iter().zip(schema) {
        match term {
            Term::Var(v) => match vars.iter().find(|(name, _)| name == v) {
                Some((_, known)) if known != sort => {
                    return Err(TypeIssue::VariableSortConflict {
                        var: v.clone(),
                        first: known.clone(),
                        second: sort.clone(),
                    })
                }
                Some(_) => {}
                None => vars.push((v.clone(), sort.clone())),
            },
            Term::Const(c) => check_constant(c, Some(sort), sorts)?,
        }
    }
    Ok(())
}

fn check_constant(c: &str, expected: Option<&str>, sorts: &[SortDecl]) -> Result<(), TypeIssue> {
    let found = sorts
        .iter()
        .find(|s| s.constants.iter().any(|k| k == c))
        .ok_or_else(|| TypeIssue::UndeclaredConstant(c.to_string()))?;
    match expected {
        Some(e) if e != found.name => Err(TypeIssue::SortMismatch {
            term: c.to_string(),
            expected: e.to_string(),
            found: found.name.clone(),
        }),
        _ => Ok(()),
    }
}

/// Infer variable sorts for a law: `typed` lists every atom in a sort-typed
/// position together with its schema; guards in `body` may only mention
/// variables typed there.
pub fn infer_variable_sorts<'a>(
    typed: impl IntoIterator<Item = (&'a Atom, &'a [String])>,
    body: &[Condition],
    sorts: &[SortDecl],
) -> Result<VarSorts, TypeIssue> {
    let mut vars = VarSorts::new();
    for (atom, schema) in typed {
        type_atom(atom, schema, sorts, &mut vars)?;
    }
    for cond in body {
        if let Condition::Neq(a, b) = cond {
            for t in [a, b] {
                match t {
                    Term::Var(v) => {
                        if !vars.iter().any(|(name, _)| name == v) {
                            return Err(TypeIssue::UntypedVariable(v.clone()));
                        }
                    }
                    Term::Const(c) => check_constant(c, None, sorts)?,
                }
            }
        }
    }
    Ok(vars)
}
