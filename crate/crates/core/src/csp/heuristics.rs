use std::cmp::Ordering;

use rand::Rng;

use crate::catalog::{BehaviorId, Catalog, TaskId};

use super::{Assignment, CspError, DomainTable, Value};

/// Value order for branching on `task`. `running` is the configuration the
/// heuristics try to preserve.
pub fn order_values<R: Rng + ?Sized>(
    catalog: &Catalog,
    task: TaskId,
    table: &DomainTable,
    running: &Assignment,
    rng: &mut R,
) -> Result<Vec<Value>, CspError> {
    let domain = table.get(task);
    if domain.is_empty() {
        return Err(CspError::EmptyDomain(catalog.task_name(task).to_string()));
    }

    let mut behaviors: Vec<BehaviorId> = domain.behaviors().collect();
    // descending suitability, id order among equals
    behaviors.sort_by(|&a, &b| by_suitability(catalog, a, b));
    let has_inactive = domain.contains_inactive();
    let current = running
        .values()
        .get(task.index())
        .copied()
        .unwrap_or(Value::Inactive);

    let mut out = Vec::with_capacity(domain.len());
    match current {
        Value::Inactive if has_inactive => {
            out.push(Value::Inactive);
            out.extend(behaviors.into_iter().map(Value::Behavior));
            return Ok(out);
        }
        Value::Behavior(b) if behaviors.contains(&b) => {
            let best = behaviors
                .first()
                .map(|&x| catalog.suitability(x))
                .unwrap_or(0.0);
            if catalog.suitability(b) >= best {
                out.push(Value::Behavior(b));
                out.extend(
                    behaviors
                        .into_iter()
                        .filter(|&x| x != b)
                        .map(Value::Behavior),
                );
                if has_inactive {
                    out.push(Value::Inactive);
                }
                return Ok(out);
            }
        }
        _ => {}
    }

    if let Some(&top) = behaviors.first() {
        let top_s = catalog.suitability(top);
        let tied = behaviors
            .iter()
            .take_while(|&&x| catalog.suitability(x) == top_s)
            .count();
        if tied > 1 {
            let pick = rng.gen_range(0..tied);
            let chosen = behaviors.remove(pick);
            behaviors.insert(0, chosen);
        }
    }
    out.extend(behaviors.into_iter().map(Value::Behavior));
    if has_inactive {
        out.push(Value::Inactive);
    }
    Ok(out)
}

fn by_suitability(catalog: &Catalog, a: BehaviorId, b: BehaviorId) -> Ordering {
    catalog
        .suitability(b)
        .total_cmp(&catalog.suitability(a))
        .then(a.cmp(&b))
}
