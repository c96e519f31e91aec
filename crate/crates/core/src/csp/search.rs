//! Depth-first backtracking with propagation, deferred performance checks
//! and no-good learning.

use std::time::Instant;

use rand::Rng;

use crate::catalog::{Catalog, TaskId};

use super::{
    make_nogood, order_values, performance_violations, propagate, propagate_from, Assignment,
    ConstraintNetwork, Domain, DomainTable, NoGoodSet, Value,
};

pub struct SearchContext<'a> {
    pub catalog: &'a Catalog,
    pub network: &'a ConstraintNetwork,
    /// Configuration the value heuristics try to keep.
    pub running: &'a Assignment,
    pub deadline: Option<Instant>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchOutcome {
    Found(Assignment),
    Exhausted,
    TimedOut,
}

impl SearchOutcome {
    pub fn assignment(self) -> Option<Assignment> {
        match self {
            SearchOutcome::Found(a) => Some(a),
            _ => None,
        }
    }
}

struct TimedOut;

/// First assignment satisfying every constraint and avoiding every no-good.
/// Performance no-goods learned on the way are added to `nogoods`.
pub fn search<R: Rng + ?Sized>(
    ctx: &SearchContext<'_>,
    table: &DomainTable,
    nogoods: &mut NoGoodSet,
    rng: &mut R,
) -> SearchOutcome {
    let mut root = table.clone();
    if !propagate(ctx.catalog, ctx.network, &mut root) {
        return SearchOutcome::Exhausted;
    }
    match descend(ctx, root, nogoods, rng) {
        Ok(Some(a)) => SearchOutcome::Found(a),
        Ok(None) => SearchOutcome::Exhausted,
        Err(TimedOut) => SearchOutcome::TimedOut,
    }
}

fn descend<R: Rng + ?Sized>(
    ctx: &SearchContext<'_>,
    mut table: DomainTable,
    nogoods: &mut NoGoodSet,
    rng: &mut R,
) -> Result<Option<Assignment>, TimedOut> {
    if ctx.deadline.is_some_and(|d| Instant::now() >= d) {
        return Err(TimedOut);
    }
    if !apply_nogoods(ctx, &mut table, nogoods) {
        return Ok(None);
    }

    if let Some(candidate) = table.as_assignment() {
        let violations = performance_violations(ctx.catalog, &candidate);
        if violations.is_empty() {
            return Ok(Some(candidate));
        }
        for v in &violations {
            nogoods.insert(make_nogood(ctx.catalog, &candidate, v));
        }
        return Ok(None);
    }

    let open: Vec<TaskId> = table
        .iter()
        .filter(|(_, d)| d.len() > 1)
        .map(|(t, _)| t)
        .collect();
    let var = open[rng.gen_range(0..open.len())];
    let values = order_values(ctx.catalog, var, &table, ctx.running, rng)
        .expect("open variable has a non-empty domain");
    for value in values {
        let mut child = table.clone();
        child.set(var, Domain::singleton(value));
        if !propagate_from(ctx.catalog, ctx.network, &mut child, &[var]) {
            continue;
        }
        if let Some(found) = descend(ctx, child, nogoods, rng)? {
            return Ok(Some(found));
        }
    }
    Ok(None)
}

/// Prunes with stored no-goods until nothing changes. A no-good whose
/// entries are all fixed kills the node; one with a single unfixed entry
/// removes that value. Returns false on a dead node.
fn apply_nogoods(ctx: &SearchContext<'_>, table: &mut DomainTable, nogoods: &NoGoodSet) -> bool {
    loop {
        let mut changed = None;
        for nogood in nogoods.iter() {
            let mut open: Option<(TaskId, Value)> = None;
            let mut live = true;
            for &(task, value) in nogood.entries() {
                let domain = table.get(task);
                if !domain.contains(value) {
                    live = false;
                    break;
                }
                if domain.len() > 1 {
                    if open.is_some() {
                        live = false;
                        break;
                    }
                    open = Some((task, value));
                }
            }
            if !live {
                continue;
            }
            match open {
                None => return false,
                Some((task, value)) => {
                    table.get_mut(task).remove(value);
                    changed = Some(task);
                    break;
                }
            }
        }
        match changed {
            None => return true,
            Some(task) => {
                if !propagate_from(ctx.catalog, ctx.network, table, &[task]) {
                    return false;
                }
            }
        }
    }
}
