//! Exhaustive reference solver. Uses the independent checker and the
//! objective function only.

use crate::catalog::Catalog;
use crate::csp::{check_assignment, Assignment, DomainTable, Value};
use crate::optimizer::{objective_vector, ObjectiveVector};
use crate::state::CoordinatorState;

pub const DEFAULT_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub best: Option<Assignment>,
    pub best_vector: Option<ObjectiveVector>,
    pub valid_count: u64,
    pub enumerated: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("search space {size} exceeds oracle cap {cap}")]
pub struct CapExceeded {
    pub size: u128,
    pub cap: u128,
}

/// Every assignment drawn from `table`, in odometer order with the last task
/// varying fastest. The first maximum wins ties.
pub fn enumerate_optimal(
    catalog: &Catalog,
    table: &DomainTable,
    state: &CoordinatorState,
    cap: u128,
) -> Result<OracleResult, CapExceeded> {
    let valid = for_each_valid(catalog, table, state, cap, |_| {})?;
    let mut best: Option<(Assignment, ObjectiveVector)> = None;
    for_each_valid(catalog, table, state, cap, |a| {
        let v = objective_vector(catalog, a, state);
        if best.as_ref().is_none_or(|(_, b)| v.lex_cmp(b).is_gt()) {
            best = Some((a.clone(), v));
        }
    })?;
    let (best, best_vector) = match best {
        Some((a, v)) => (Some(a), Some(v)),
        None => (None, None),
    };
    Ok(OracleResult {
        best,
        best_vector,
        valid_count: valid.0,
        enumerated: valid.1,
    })
}

/// All valid assignments over `table`.
pub fn valid_assignments(
    catalog: &Catalog,
    table: &DomainTable,
    state: &CoordinatorState,
    cap: u128,
) -> Result<Vec<Assignment>, CapExceeded> {
    let mut out = Vec::new();
    for_each_valid(catalog, table, state, cap, |a| out.push(a.clone()))?;
    Ok(out)
}

fn for_each_valid(
    catalog: &Catalog,
    table: &DomainTable,
    state: &CoordinatorState,
    cap: u128,
    mut visit: impl FnMut(&Assignment),
) -> Result<(u64, u128), CapExceeded> {
    let domains: Vec<Vec<Value>> = table.iter().map(|(_, d)| d.iter().collect()).collect();
    let size: u128 = domains.iter().map(|d| d.len() as u128).product();
    if size > cap {
        return Err(CapExceeded { size, cap });
    }
    if size == 0 {
        return Ok((0, 0));
    }
    let mut index = vec![0usize; domains.len()];
    let mut valid = 0u64;
    let mut enumerated = 0u128;
    loop {
        let a = Assignment::from_values(index.iter().zip(&domains).map(|(&i, d)| d[i]).collect());
        enumerated += 1;
        if check_assignment(&a, catalog, &state.situation).is_empty() {
            valid += 1;
            visit(&a);
        }
        let mut pos = domains.len();
        loop {
            if pos == 0 {
                return Ok((valid, enumerated));
            }
            pos -= 1;
            index[pos] += 1;
            if index[pos] < domains[pos].len() {
                break;
            }
            index[pos] = 0;
        }
    }
}
