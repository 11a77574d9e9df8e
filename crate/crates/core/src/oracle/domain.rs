//! Integer domain reduction: activity-based bound propagation and LP probing.

use crate::milp::{MilpModel, Sense, SolveOptions, SolveStatus, Solver, VarId};
use std::collections::BTreeSet;

/// Values above this are probed one by one; wider domains only at the ends.
const PROBE_EACH_LIMIT: u64 = 64;
const INT_TOL: f64 = 1e-6;

/// Allowed values `lo..=hi` minus `holes`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    pub lo: i64,
    pub hi: i64,
    pub holes: BTreeSet<i64>,
}

impl Domain {
    pub fn interval(lo: i64, hi: i64) -> Self {
        Self {
            lo,
            hi,
            holes: BTreeSet::new(),
        }
    }

    pub fn size(&self) -> u64 {
        if self.hi < self.lo {
            return 0;
        }
        (self.hi - self.lo + 1) as u64 - self.holes.len() as u64
    }

    pub fn values(&self) -> impl Iterator<Item = i64> + '_ {
        (self.lo..=self.hi).filter(|v| !self.holes.contains(v))
    }

    fn remove(&mut self, v: i64) {
        if v == self.lo {
            self.lo += 1;
        } else if v == self.hi {
            self.hi -= 1;
        } else if v > self.lo && v < self.hi {
            self.holes.insert(v);
        }
        while self.lo <= self.hi && self.holes.remove(&self.lo) {
            self.lo += 1;
        }
        while self.lo <= self.hi && self.holes.remove(&self.hi) {
            self.hi -= 1;
        }
        let (lo, hi) = (self.lo, self.hi);
        self.holes.retain(|&h| h > lo && h < hi);
    }

    fn clamp(&mut self, lo: i64, hi: i64) {
        self.lo = self.lo.max(lo);
        self.hi = self.hi.min(hi);
        let (lo, hi) = (self.lo, self.hi);
        self.holes.retain(|&h| h > lo && h < hi);
    }
}

/// Reduced domains of every integer variable, in handle order.
#[derive(Debug, Clone)]
pub struct Domains {
    pub vars: Vec<VarId>,
    pub domains: Vec<Domain>,
}

impl Domains {
    /// Integer domains straight from the variable bounds. `None` if some
    /// bound is infinite.
    pub fn from_bounds(model: &MilpModel) -> Option<Self> {
        let vars = model.integer_vars();
        let mut domains = Vec::with_capacity(vars.len());
        for &v in &vars {
            let var = model.variable(v);
            if !var.lower.is_finite() || !var.upper.is_finite() {
                return None;
            }
            domains.push(Domain::interval(
                (var.lower - INT_TOL).ceil() as i64,
                (var.upper + INT_TOL).floor() as i64,
            ));
        }
        Some(Self { vars, domains })
    }

    pub fn is_empty(&self) -> bool {
        self.domains.iter().any(|d| d.size() == 0)
    }

    /// Product of domain sizes, saturating.
    pub fn product(&self) -> u128 {
        self.domains
            .iter()
            .fold(1u128, |acc, d| acc.saturating_mul(d.size() as u128))
    }

    /// Copy of `model` with integer bounds tightened to the domains and
    /// integrality dropped.
    pub fn relaxation(&self, model: &MilpModel) -> MilpModel {
        let mut lp = model.fixed_lp(&[]);
        for (&v, d) in self.vars.iter().zip(&self.domains) {
            // Hull of the domain; holes are not representable.
            lp.set_bounds(v, d.lo as f64, (d.hi as f64).max(d.lo as f64))
                .expect("domain is nonempty");
        }
        lp
    }
}

/// Activity-based bound tightening to a fixpoint. Returns `false` if some
/// domain becomes empty.
pub fn propagate(model: &MilpModel, doms: &mut Domains) -> bool {
    let n = model.num_vars();
    let mut lb: Vec<f64> = model.variables().iter().map(|v| v.lower).collect();
    let mut ub: Vec<f64> = model.variables().iter().map(|v| v.upper).collect();
    let mut is_int = vec![None; n];
    for (k, &v) in doms.vars.iter().enumerate() {
        lb[v.index()] = doms.domains[k].lo as f64;
        ub[v.index()] = doms.domains[k].hi as f64;
        is_int[v.index()] = Some(k);
    }
    for _round in 0..100 {
        let mut changed = false;
        for row in model.constraints() {
            // Activity bounds with infinite contributions counted separately.
            let (mut min_fin, mut min_inf, mut max_fin, mut max_inf) = (0.0, 0usize, 0.0, 0usize);
            for &(a, v) in &row.terms {
                let (l, u) = (lb[v.index()], ub[v.index()]);
                let (lo_c, hi_c) = if a > 0.0 { (a * l, a * u) } else { (a * u, a * l) };
                if lo_c.is_finite() {
                    min_fin += lo_c;
                } else {
                    min_inf += 1;
                }
                if hi_c.is_finite() {
                    max_fin += hi_c;
                } else {
                    max_inf += 1;
                }
            }
            let upper_side = matches!(row.sense, Sense::Le | Sense::Eq);
            let lower_side = matches!(row.sense, Sense::Ge | Sense::Eq);
            for &(a, v) in &row.terms {
                let i = v.index();
                let (l, u) = (lb[i], ub[i]);
                let (lo_c, hi_c) = if a > 0.0 { (a * l, a * u) } else { (a * u, a * l) };
                let mut new_lo = l;
                let mut new_hi = u;
                if upper_side {
                    // a·x ≤ rhs − min(rest)
                    let rest = if lo_c.is_finite() {
                        (min_inf == 0).then_some(min_fin - lo_c)
                    } else {
                        (min_inf == 1).then_some(min_fin)
                    };
                    if let Some(rest) = rest {
                        let bound = (row.rhs - rest) / a;
                        if a > 0.0 {
                            new_hi = new_hi.min(bound);
                        } else {
                            new_lo = new_lo.max(bound);
                        }
                    }
                }
                if lower_side {
                    // a·x ≥ rhs − max(rest)
                    let rest = if hi_c.is_finite() {
                        (max_inf == 0).then_some(max_fin - hi_c)
                    } else {
                        (max_inf == 1).then_some(max_fin)
                    };
                    if let Some(rest) = rest {
                        let bound = (row.rhs - rest) / a;
                        if a > 0.0 {
                            new_lo = new_lo.max(bound);
                        } else {
                            new_hi = new_hi.min(bound);
                        }
                    }
                }
                if let Some(k) = is_int[i] {
                    let lo_i = (new_lo - INT_TOL).ceil();
                    let hi_i = (new_hi + INT_TOL).floor();
                    if lo_i > l || hi_i < u {
                        let d = &mut doms.domains[k];
                        d.clamp(lo_i.max(l) as i64, hi_i.min(u) as i64);
                        if d.size() == 0 {
                            return false;
                        }
                        lb[i] = d.lo as f64;
                        ub[i] = d.hi as f64;
                        changed = true;
                    }
                } else {
                    // Loosened slightly so rounding never cuts a feasible point.
                    let slack = 1e-9 * (1.0 + new_lo.abs().max(new_hi.abs()).min(1e12));
                    if new_lo - slack > l + 1e-9 * (1.0 + l.abs()) {
                        lb[i] = new_lo - slack;
                        changed = true;
                    }
                    if new_hi + slack < u - 1e-9 * (1.0 + u.abs()) {
                        ub[i] = new_hi + slack;
                        changed = true;
                    }
                    if lb[i] > ub[i] + 1e-6 * (1.0 + ub[i].abs()) {
                        return false;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    true
}

/// Removes integer values whose LP relaxation (all other integers relaxed
/// over their current hull) is infeasible, alternating with propagation.
/// Returns `false` if the model is found infeasible.
pub fn probe(
    model: &MilpModel,
    doms: &mut Domains,
    solver: &dyn Solver,
    lp: &SolveOptions,
    jobs: usize,
) -> Result<bool, crate::milp::SolveError> {
    for _round in 0..8 {
        let base = doms.relaxation(model);
        let mut tests: Vec<(usize, i64)> = Vec::new();
        for (k, d) in doms.domains.iter().enumerate() {
            match d.size() {
                0 | 1 => {}
                s if s <= PROBE_EACH_LIMIT => tests.extend(d.values().map(|v| (k, v))),
                _ => {
                    tests.push((k, d.lo));
                    tests.push((k, d.hi));
                }
            }
        }
        if tests.is_empty() {
            return Ok(true);
        }
        let outcomes = crate::par::map(&tests, jobs, |&(k, value)| {
            let mut m = base.clone();
            m.set_bounds(doms.vars[k], value as f64, value as f64)
                .expect("value lies in the domain");
            solver.solve(&m, lp).map(|r| r.status == SolveStatus::Infeasible)
        });
        let mut removed = false;
        for (&(k, value), out) in tests.iter().zip(outcomes) {
            if out? {
                doms.domains[k].remove(value);
                removed = true;
            }
        }
        if doms.is_empty() || !propagate(model, doms) {
            return Ok(false);
        }
        if !removed {
            return Ok(true);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::VarKind;

    #[test]
    fn domain_removal_keeps_ends_tight() {
        let mut d = Domain::interval(0, 5);
        d.remove(3);
        assert_eq!(d.size(), 5);
        d.remove(0);
        d.remove(5);
        assert_eq!((d.lo, d.hi), (1, 4));
        d.remove(4);
        assert_eq!((d.lo, d.hi), (1, 2));
        assert!(d.holes.is_empty());
        assert_eq!(d.values().collect::<Vec<_>>(), vec![1, 2]);
    }

    #[test]
    fn propagation_fixes_implied_binaries() {
        let mut m = MilpModel::new("p");
        let x = m.add_variable("x", VarKind::Continuous, 0.0, 10.0).unwrap();
        let u = m.add_variable("u", VarKind::Binary, 0.0, 1.0).unwrap();
        let y = m.add_variable("y", VarKind::Integer, 0.0, 9.0).unwrap();
        // x ≥ 4 and x ≤ 5·u force u = 1; 2y ≤ x ≤ 5 caps y at 2.
        m.add_constraint("lo", [(1.0, x)], Sense::Ge, 4.0).unwrap();
        m.add_constraint("gate", [(1.0, x), (-5.0, u)], Sense::Le, 0.0).unwrap();
        m.add_constraint("cap", [(2.0, y), (-1.0, x)], Sense::Le, 0.0).unwrap();
        let mut d = Domains::from_bounds(&m).unwrap();
        assert!(propagate(&m, &mut d));
        assert_eq!((d.domains[0].lo, d.domains[0].hi), (1, 1));
        assert_eq!((d.domains[1].lo, d.domains[1].hi), (0, 2));
    }

    #[test]
    fn propagation_detects_infeasibility() {
        let mut m = MilpModel::new("p");
        let u = m.add_variable("u", VarKind::Binary, 0.0, 1.0).unwrap();
        m.add_constraint("c", [(1.0, u)], Sense::Ge, 2.0).unwrap();
        let mut d = Domains::from_bounds(&m).unwrap();
        assert!(!propagate(&m, &mut d));
    }
}
