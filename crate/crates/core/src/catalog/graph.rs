//! Static constraint-graph analysis done once at load time.

use std::collections::VecDeque;

use super::{Catalog, TaskId};

/// Partition of the tasks into connected groups of the constraint graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    groups: Vec<Vec<TaskId>>,
    of_task: Vec<usize>,
}

impl Components {
    pub fn groups(&self) -> &[Vec<TaskId>] {
        &self.groups
    }

    pub fn component_of(&self, task: TaskId) -> usize {
        self.of_task[task.index()]
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn same_component(&self, a: TaskId, b: TaskId) -> bool {
        self.component_of(a) == self.component_of(b)
    }
}

/// Undirected adjacency: incompatibility pairs plus requirement edges.
pub(crate) fn constraint_adjacency(catalog: &Catalog) -> Vec<Vec<TaskId>> {
    let n = catalog.num_tasks();
    let mut adj: Vec<Vec<TaskId>> = vec![Vec::new(); n];
    let mut link = |a: TaskId, b: TaskId| {
        if !adj[a.index()].contains(&b) {
            adj[a.index()].push(b);
        }
        if !adj[b.index()].contains(&a) {
            adj[b.index()].push(a);
        }
    };
    for &(a, b) in catalog.incompatibilities() {
        link(a, b);
    }
    for b in catalog.behavior_ids() {
        let from = catalog.task_of(b);
        for r in catalog.requirements(b) {
            link(from, r.task);
        }
    }
    adj
}

pub(crate) fn compute_components(catalog: &Catalog) -> Components {
    let n = catalog.num_tasks();
    let adj = constraint_adjacency(catalog);
    let mut of_task = vec![usize::MAX; n];
    let mut groups = Vec::new();
    for root in 0..n {
        if of_task[root] != usize::MAX {
            continue;
        }
        let id = groups.len();
        let mut group = Vec::new();
        let mut queue = VecDeque::from([root]);
        of_task[root] = id;
        while let Some(t) = queue.pop_front() {
            group.push(TaskId::new(t));
            for &nb in &adj[t] {
                if of_task[nb.index()] == usize::MAX {
                    of_task[nb.index()] = id;
                    queue.push_back(nb.index());
                }
            }
        }
        group.sort();
        groups.push(group);
    }
    Components { groups, of_task }
}

/// Kahn's algorithm over task -> required task edges, ties broken by task index.
/// Dependents come before the tasks they require. `None` iff the graph has a cycle.
pub(crate) fn requirement_topological_order(catalog: &Catalog) -> Option<Vec<TaskId>> {
    let n = catalog.num_tasks();
    let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indegree = vec![0usize; n];
    for b in catalog.behavior_ids() {
        let from = catalog.task_of(b).index();
        for r in catalog.requirements(b) {
            let to = r.task.index();
            if !out_edges[from].contains(&to) {
                out_edges[from].push(to);
                indegree[to] += 1;
            }
        }
    }
    let mut ready: std::collections::BTreeSet<usize> =
        (0..n).filter(|&t| indegree[t] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(t) = ready.pop_first() {
        order.push(TaskId::new(t));
        for &to in &out_edges[t] {
            indegree[to] -= 1;
            if indegree[to] == 0 {
                ready.insert(to);
            }
        }
    }
    (order.len() == n).then_some(order)
}

pub(crate) fn empty_components() -> Components {
    Components {
        groups: Vec::new(),
        of_task: Vec::new(),
    }
}
