//! Randomized verification sweep over generated instances.

use rayon::prelude::*;
use serde::Serialize;

use crate::agraph::{validate, AGraph};
use crate::instance::{generate, InstanceSpec};
use crate::maxedges::{
    check_certificate, find_one_maximal_edge, verify_edge_count_bound, BoundStatus,
};
use crate::pullback::{pullback, verify_theorem1};
use crate::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub index: u64,
    pub rejections: usize,
    /// `None` when generation gave up.
    pub ranks: Option<(u64, u64, u64)>,
    pub components: usize,
    pub edge_bound: Option<BoundStatus>,
    pub failures: Vec<String>,
}

impl Outcome {
    pub fn skipped(&self) -> bool {
        self.ranks.is_none()
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SweepOptions {
    /// Also runs the certified maximal-edge search and the edge-count chain.
    pub edge_count: bool,
}

fn check_maximal_edge(g: &AGraph, what: &str, failures: &mut Vec<String>) {
    let core = g.core();
    match find_one_maximal_edge(&core) {
        Ok((e, cert)) => {
            if core.euler_char() >= 0 {
                failures.push(format!("{what}: maximal edge found with χ ≥ 0"));
            }
            if check_certificate(&core, e, &cert) != Ok(true) {
                failures.push(format!("{what}: certificate for e{e} rejected"));
            }
        }
        Err(Error::ChiNonNegative) if core.euler_char() >= 0 => {}
        Err(err) => failures.push(format!("{what}: {err}")),
    }
}

pub fn check_instance(spec: &InstanceSpec, index: u64, opts: SweepOptions) -> Outcome {
    let inst = match generate(spec, index) {
        Ok(inst) => inst,
        Err(Error::RetriesExhausted(n)) => {
            return Outcome {
                index,
                rejections: n,
                ranks: None,
                components: 0,
                edge_bound: None,
                failures: vec![],
            }
        }
        Err(e) => {
            return Outcome {
                index,
                rejections: 0,
                ranks: None,
                components: 0,
                edge_bound: None,
                failures: vec![e.to_string()],
            }
        }
    };
    let [g1, g2] = &inst.graphs;
    let mut failures = Vec::new();
    for (i, g) in [g1, g2].into_iter().enumerate() {
        if !validate(g).is_empty() {
            failures.push(format!("H{}: graph is not irreducible", i + 1));
        }
        if inst.gens[i].iter().any(|w| !g.membership(w)) {
            failures.push(format!("H{}: a generator is not accepted", i + 1));
        }
    }
    let report = verify_theorem1(g1, g2);
    if !report.holds {
        failures.push(format!(
            "rank bound violated: {} > {}·{}",
            report.rank_pair, report.rank1, report.rank2
        ));
    }
    let p = pullback(g1, g2);
    if !validate(&p.graph).is_empty() {
        failures.push("pullback is not irreducible".into());
    }
    let components = p.components(g1, g2).len();
    check_maximal_edge(g1, "H1", &mut failures);
    check_maximal_edge(&p.graph, "pullback", &mut failures);
    let edge_bound = opts
        .edge_count
        .then(|| verify_edge_count_bound(&p, g1, g2, None).status);
    if edge_bound == Some(BoundStatus::Violation) {
        failures.push("edge-count chain violated".into());
    }
    Outcome {
        index,
        rejections: inst.rejections,
        ranks: Some((report.rank1, report.rank2, report.rank_pair)),
        components,
        edge_bound,
        failures,
    }
}

/// Checks instances `0..count` in parallel; results are in index order.
pub fn sweep(spec: &InstanceSpec, count: u64, opts: SweepOptions) -> Vec<Outcome> {
    (0..count)
        .into_par_iter()
        .map(|i| check_instance(spec, i, opts))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweep_is_clean_and_ordered() {
        let spec = InstanceSpec {
            seed: 11,
            ..Default::default()
        };
        let out = sweep(&spec, 20, SweepOptions { edge_count: true });
        assert_eq!(
            out.iter().map(|o| o.index).collect::<Vec<_>>(),
            (0..20).collect::<Vec<_>>()
        );
        assert!(out.iter().all(Outcome::ok));
        assert!(out
            .iter()
            .all(|o| o.edge_bound != Some(BoundStatus::Violation)));
        assert_eq!(out, sweep(&spec, 20, SweepOptions { edge_count: true }));
    }
}
