//! Exact solvers: exhaustive enumeration and a perspective branch-and-bound.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::heuristics::{local_search_swap, round_restricted, HeuristicConfig};
use crate::problem::{deltas_from_residual, FixState, GramCache, Incumbent, Instance, ProblemSpec};
use crate::relax::{lipschitz_constant, solve_restricted, solve_restricted_until, RelaxSolution, SolverConfig};
use crate::screening::{screen_restricted, ScreenReport};

/// Largest `n` enumerated for the regularized variant.
pub const BRUTE_FORCE_MAX_N: usize = 25;
/// Largest number of supports enumerated for the cardinality variant.
pub const BRUTE_FORCE_MAX_SUPPORTS: u64 = 1_000_000;

/// Open nodes kept in best-first order before switching to depth-first.
const OPEN_NODE_CAP: usize = 1_000_000;

/// Absolute tolerance on `L ≥ ζ̄` pruning.
const PRUNE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForce {
    pub best: Incumbent,
    /// Every support whose objective is within `1e-9·(1 + |opt|)` of the optimum.
    pub optimal_supports: Vec<Vec<usize>>,
}

fn binomial_prefix_sum(n: usize, k: usize) -> u64 {
    let mut total: u64 = 0;
    let mut c: u64 = 1;
    for j in 0..=k.min(n) {
        total = total.saturating_add(c);
        c = c.saturating_mul((n - j) as u64) / (j as u64 + 1);
    }
    total
}

fn for_each_combination(n: usize, size: usize, mut f: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        f(&idx);
        let Some(pos) = (0..size).rev().find(|&p| idx[p] != p + n - size) else {
            return;
        };
        idx[pos] += 1;
        for p in pos + 1..size {
            idx[p] = idx[p - 1] + 1;
        }
    }
}

/// Enumerates every admissible support, each refit by ridge.
///
/// Refuses with [`Error::SizeCap`] above `n = 25` (regularized) or more than
/// a million supports of size at most `k` (cardinality).
pub fn brute_force(inst: &Instance, spec: &ProblemSpec) -> Result<BruteForce> {
    spec.validate_for(inst)?;
    let n = inst.n();
    let cache = GramCache::new(inst);
    let gamma = spec.gamma();
    let mut scored: Vec<(f64, Vec<usize>)> = Vec::new();
    match *spec {
        ProblemSpec::Reg { mu, .. } => {
            if n > BRUTE_FORCE_MAX_N {
                return Err(Error::SizeCap(format!(
                    "n = {n} exceeds {BRUTE_FORCE_MAX_N} for the regularized variant"
                )));
            }
            for mask in 0u64..(1u64 << n) {
                let s: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
                let v = cache.ridge_value(gamma, &s) + mu * s.len() as f64;
                scored.push((v, s));
            }
        }
        ProblemSpec::Card { k, .. } => {
            let count = binomial_prefix_sum(n, k);
            if count > BRUTE_FORCE_MAX_SUPPORTS {
                return Err(Error::SizeCap(format!(
                    "{count} supports of size <= {k} exceed {BRUTE_FORCE_MAX_SUPPORTS}"
                )));
            }
            for size in 0..=k {
                for_each_combination(n, size, |s| {
                    scored.push((cache.ridge_value(gamma, s), s.to_vec()));
                });
            }
        }
    }
    let approx = scored.iter().map(|(v, _)| *v).fold(f64::INFINITY, f64::min);
    // re-evaluate near-optimal supports directly to avoid Gram cancellation
    let mut exact: Vec<Incumbent> = scored
        .into_iter()
        .filter(|(v, _)| *v <= approx + 1e-6 * (1.0 + approx.abs()))
        .map(|(_, s)| Incumbent::from_support(inst, spec, &s))
        .collect::<Result<_>>()?;
    exact.sort_by(|a, b| a.objective.total_cmp(&b.objective).then_with(|| a.support.cmp(&b.support)));
    let best = exact[0].clone();
    let tol = 1e-9 * (1.0 + best.objective.abs());
    let optimal_supports = exact
        .into_iter()
        .take_while(|inc| inc.objective <= best.objective + tol)
        .map(|inc| inc.support)
        .collect();
    Ok(BruteForce {
        best,
        optimal_supports,
    })
}

/// Relaxation of the subproblem defined by `fixes`, with its certified bound.
pub fn node_relaxation(
    inst: &Instance,
    spec: &ProblemSpec,
    fixes: &[FixState],
    cfg: &SolverConfig,
) -> Result<RelaxSolution> {
    solve_restricted(inst, spec, fixes, cfg, None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchRule {
    /// Free variable whose relaxed indicator is closest to 1/2.
    MostFractionalZ,
    /// First free variable in decreasing order of the root `δ_i = (A_i'ε̄)²`.
    ///
    /// The order is fixed once at the root, where screening has not yet
    /// acted, so a screened search branches on the same sequence as an
    /// unscreened one minus the variables screening fixed. Every screened
    /// node then has an unscreened counterpart with fewer fixes, which is
    /// what makes root screening unable to enlarge the tree.
    #[default]
    LargestDelta,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BnBConfig {
    pub time_limit_s: f64,
    pub node_limit: usize,
    pub screen_at_root: bool,
    pub screen_per_node: bool,
    pub branch_rule: BranchRule,
    pub solver: SolverConfig,
    pub heuristic: HeuristicConfig,
}

impl Default for BnBConfig {
    fn default() -> Self {
        Self {
            time_limit_s: 600.0,
            node_limit: 10_000_000,
            screen_at_root: true,
            screen_per_node: false,
            branch_rule: BranchRule::default(),
            solver: SolverConfig::default(),
            heuristic: HeuristicConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BnBStats {
    /// Nodes whose relaxation was solved.
    pub nodes_explored: usize,
    pub wall_time_s: f64,
    /// True iff the tree was exhausted within the limits.
    pub optimal: bool,
    pub best: Incumbent,
    /// Variables fixed by root screening.
    pub root_fixed: usize,
    pub root_lower_bound: f64,
    pub root_screen: Option<ScreenReport>,
}

struct Node {
    fixes: Vec<FixState>,
    bound: f64,
    depth: usize,
    id: u64,
    warm: DVector<f64>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // max-heap: lowest bound first, then oldest
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.id.cmp(&self.id))
    }
}

/// Best-first frontier that degrades to depth-first when it grows too large.
#[derive(Default)]
struct Frontier {
    heap: BinaryHeap<Node>,
    stack: Vec<Node>,
}

impl Frontier {
    fn push(&mut self, node: Node) {
        if self.heap.len() >= OPEN_NODE_CAP {
            self.stack.push(node);
        } else {
            self.heap.push(node);
        }
    }

    fn pop(&mut self) -> Option<Node> {
        self.stack.pop().or_else(|| self.heap.pop())
    }

    fn is_empty(&self) -> bool {
        self.heap.is_empty() && self.stack.is_empty()
    }
}

/// Free variables by decreasing `δ`, ties by index.
fn delta_order(delta: &DVector<f64>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..delta.len()).collect();
    order.sort_by(|&a, &b| delta[b].total_cmp(&delta[a]).then(a.cmp(&b)));
    order
}

fn choose_branch(
    rule: BranchRule,
    inst: &Instance,
    fixes: &[FixState],
    relax: &RelaxSolution,
    root_order: &[usize],
) -> Option<usize> {
    match rule {
        BranchRule::LargestDelta => root_order.iter().copied().find(|&i| fixes[i] == FixState::Free),
        BranchRule::MostFractionalZ => {
            let delta = deltas_from_residual(inst, &relax.epsilon);
            let frac = |i: usize| relax.z[i].min(1.0 - relax.z[i]);
            (0..fixes.len())
                .filter(|&i| fixes[i] == FixState::Free)
                .max_by(|&a, &b| {
                    frac(a)
                        .total_cmp(&frac(b))
                        .then(delta[a].total_cmp(&delta[b]))
                        .then(b.cmp(&a))
                })
        }
    }
}

/// Best-first branch-and-bound on the perspective relaxation.
///
/// The root solves the relaxation, rounds it into an incumbent (polished by
/// local search if configured) and, with `screen_at_root`, fixes variables by
/// the safe screening rules. Nodes branch on one free indicator, children
/// inherit the parent bound, and a node is pruned once its certified bound
/// reaches the incumbent. With `initial`, the search starts from that
/// incumbent; otherwise from the empty model.
pub fn branch_and_bound(
    inst: &Instance,
    spec: &ProblemSpec,
    cfg: &BnBConfig,
    initial: Option<Incumbent>,
) -> Result<BnBStats> {
    branch_and_bound_from(inst, spec, cfg, &vec![FixState::Free; inst.n()], initial)
}

/// [`branch_and_bound`] starting from a root that already carries fixes.
///
/// Without `initial` the search starts from the empty model, which ignores
/// `root_fixes`. That is harmless when the fixes come from safe screening,
/// since the optimum then satisfies them anyway; for arbitrary fixes pass an
/// incumbent that respects them.
pub fn branch_and_bound_from(
    inst: &Instance,
    spec: &ProblemSpec,
    cfg: &BnBConfig,
    root_fixes: &[FixState],
    initial: Option<Incumbent>,
) -> Result<BnBStats> {
    spec.validate_for(inst)?;
    cfg.solver.validate()?;
    if root_fixes.len() != inst.n() {
        return Err(crate::error::invalid("root fixes must have length n"));
    }
    let start = Instant::now();
    let deadline = start + Duration::from_secs_f64(cfg.time_limit_s.max(0.0));
    let mut solver = cfg.solver;
    if solver.lipschitz.is_none() {
        solver.lipschitz = Some(lipschitz_constant(inst));
    }

    let mut best = match initial {
        Some(inc) => inc,
        None => Incumbent::empty(inst),
    };
    let consider = |best: &mut Incumbent, cand: Incumbent| {
        if cand.objective < best.objective {
            *best = cand;
        }
    };
    let forced_support = |fixes: &[FixState]| -> Vec<usize> {
        (0..fixes.len()).filter(|&i| fixes[i] == FixState::One).collect()
    };

    let mut frontier = Frontier::default();
    frontier.push(Node {
        fixes: root_fixes.to_vec(),
        bound: f64::NEG_INFINITY,
        depth: 0,
        id: 0,
        warm: DVector::zeros(inst.n()),
    });
    let mut next_id = 1u64;
    let mut nodes = 0usize;
    let mut exhausted = true;
    let mut root_fixed = 0;
    let mut root_lower_bound = f64::NEG_INFINITY;
    let mut root_screen = None;
    let mut root_order = Vec::new();

    while let Some(node) = frontier.pop() {
        if node.bound >= best.objective - PRUNE_TOL {
            continue;
        }
        if nodes >= cfg.node_limit || Instant::now() >= deadline {
            exhausted = false;
            break;
        }
        nodes += 1;
        let is_root = node.depth == 0;
        let relax = match solve_restricted_until(inst, spec, &node.fixes, &solver, Some(&node.warm), Some(deadline)) {
            Ok(r) => r,
            Err(Error::Infeasible(_)) => continue,
            Err(e) => return Err(e),
        };
        let lower = relax.lower_bound.max(node.bound);
        if is_root {
            root_lower_bound = lower;
        }

        let mut cand = round_restricted(inst, spec, &node.fixes, &relax)?;
        if is_root && cfg.heuristic.swap_rounds > 0 && node.fixes.iter().all(|&f| f == FixState::Free) {
            cand = local_search_swap(inst, spec, &cand, cfg.heuristic.swap_rounds)?;
        }
        consider(&mut best, cand);

        if is_root {
            root_order = delta_order(&deltas_from_residual(inst, &relax.epsilon));
        }

        let mut fixes = node.fixes;
        let pruned = lower >= best.objective - PRUNE_TOL;
        if (is_root && cfg.screen_at_root) || (cfg.screen_per_node && !pruned) {
            let report = match screen_restricted(inst, spec, &fixes, &relax, best.objective) {
                Ok(r) => r,
                // the node's bound is above the incumbent
                Err(Error::InconsistentBounds { .. }) => continue,
                Err(e) => return Err(e),
            };
            if is_root {
                let already = fixes.iter().filter(|&&f| f != FixState::Free).count();
                root_fixed = report.n_fixed() - already;
                root_screen = Some(report.clone());
            }
            fixes = report.fixes;
        }
        if pruned {
            continue;
        }

        let ones = fixes.iter().filter(|&&f| f == FixState::One).count();
        let free = fixes.iter().filter(|&&f| f == FixState::Free).count();
        let leaf_support = match *spec {
            ProblemSpec::Card { k, .. } if ones + free <= k => {
                // budget covers everything left: the ridge fit on all of it is optimal
                Some((0..inst.n()).filter(|&i| fixes[i] != FixState::Zero).collect())
            }
            ProblemSpec::Card { k, .. } if ones >= k => Some(forced_support(&fixes)),
            _ if free == 0 => Some(forced_support(&fixes)),
            _ => None,
        };
        if let Some(support) = leaf_support {
            consider(&mut best, Incumbent::from_support(inst, spec, &support)?);
            continue;
        }

        let Some(j) = choose_branch(cfg.branch_rule, inst, &fixes, &relax, &root_order) else {
            continue;
        };
        for state in [FixState::One, FixState::Zero] {
            let mut child = fixes.clone();
            child[j] = state;
            let mut warm = relax.x.clone();
            if state == FixState::Zero {
                warm[j] = 0.0;
            }
            frontier.push(Node {
                fixes: child,
                bound: lower,
                depth: node.depth + 1,
                id: next_id,
                warm,
            });
            next_id += 1;
        }
    }

    Ok(BnBStats {
        nodes_explored: nodes,
        wall_time_s: start.elapsed().as_secs_f64(),
        optimal: exhausted && frontier.is_empty(),
        best,
        root_fixed,
        root_lower_bound,
        root_screen,
    })
}
